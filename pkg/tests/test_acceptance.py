"""Acceptance criteria 1-12.

Each test records a single ``criterion N: PASS|FAIL`` line; the lines are
repeated in the pytest terminal summary.  ``python tests/test_acceptance.py``
runs the same checks without pytest and prints the lines directly.
"""

import json
import os
import random
import time
from contextlib import contextmanager
from itertools import combinations_with_replacement
from math import comb

import numpy as np
import pytest

from bodyguards.arena import (
    Arena,
    joint_move_feasible,
    placement_count,
    rank_placement,
    rank_rows,
    unrank_placement,
)
from bodyguards.certificates import certificate, verify_certificate
from bodyguards.cli import main as cli_main
from bodyguards.enumeration import (
    connected_labeled_graphs,
    isomorphism_classes,
    labeled_trees,
    partitions,
    tree_canonical_form,
)
from bodyguards.graphs import Graph, generate_family, graph_from_spec
from bodyguards.policies import evader_hypercube, policy_strong_grid, policy_tree_bodyguards, strong_grid, verify_policy
from bodyguards.solver import SolveOptions, attractor, bodyguard_number, cobuchi_region, decide, eternal_core, extract_strategy
from bodyguards.suites import FIGURE1, FIGURE2, run_suite

pytestmark = pytest.mark.acceptance


class Criterion:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.failures = []
        self.notes = []
        self.start = time.perf_counter()

    def expect(self, ok, what):
        if not ok:
            self.failures.append(what)
        return ok

    def note(self, text):
        self.notes.append(text)

    @contextmanager
    def timed(self, label, budget):
        start = time.perf_counter()
        yield
        spent = time.perf_counter() - start
        self.note(f"{label} {spent:.1f}s")
        self.expect(spent < budget, f"{label} took {spent:.1f}s, budget {budget}s")


@contextmanager
def criterion(report, number, title, budget):
    c = Criterion(number, title, budget)
    error = None
    try:
        yield c
    except Exception as exc:  # recorded as a failure line, then re-raised
        error = exc
        c.failures.append(f"error: {exc!r}")
    spent = time.perf_counter() - c.start
    c.expect(spent < budget, f"took {spent:.1f}s, budget {budget}s")
    status = "FAIL" if c.failures else "PASS"
    detail = "; ".join(c.failures[:5] + c.notes)
    report(f"criterion {number}: {status}  {title}  [{spent:.1f}s]" + (f"  {detail}" if detail else ""))
    if error is not None:
        raise error
    if c.failures:
        pytest.fail("; ".join(c.failures[:10]))


def number(g, mode="open"):
    return bodyguard_number(g, SolveOptions(mode=mode))


def test_criterion_01_cycles(report):
    with criterion(report, 1, "cycles C3..C8", 5) as c:
        for n in range(3, 9):
            want = 2 if n <= 5 else 3
            got = number(generate_family("cycle", [n]))
            c.expect(got == want, f"B(C{n})={got}, want {want}")


def test_criterion_02_paths(report):
    with criterion(report, 2, "paths P2..P8", 5) as c:
        c.expect(number(generate_family("path", [2])) == 1, "B(P2) != 1")
        for n in range(3, 9):
            got = number(generate_family("path", [n]))
            c.expect(got == 2, f"B(P{n})={got}, want 2")


def _tree_classes(max_n, max_leaves):
    """One labeled representative per isomorphism class, with the labeled count it stands for."""
    classes = {}
    for n in range(3, max_n + 1):
        for edges in labeled_trees(n, max_leaves):
            key = (n, tree_canonical_form(n, edges))
            if key in classes:
                classes[key][1] += 1
            else:
                classes[key] = [edges, 1]
    return classes


def test_criterion_03_trees(report):
    with criterion(report, 3, "trees n<=9, leaves<=4: B = leaves, tree policy wins", 600) as c:
        classes = _tree_classes(9, 4)
        labeled = sum(count for _, count in classes.values())
        # Cayley-type check on the generator: all n^(n-2) codes for small n
        c.expect(sum(1 for _ in labeled_trees(6)) == 6**4, "labeled tree generator miscounts n=6")
        per_n = {}
        for (n, _), (edges, _) in sorted(classes.items()):
            g = Graph.from_edges(n, edges)
            leaves = _leaves(g)
            got = number(g)
            c.expect(got == leaves, f"B={got} but {leaves} leaves on {edges}")
            verdict = verify_policy(g, leaves, policy_tree_bodyguards(g))
            c.expect(verdict.ok, f"tree policy fails on {edges}")
            per_n[n] = per_n.get(n, 0) + 1
        # the policy's tie-breaks depend on labels, so smaller orders are checked on every labeling
        for n in range(3, 7):
            for edges in labeled_trees(n, 4):
                g = Graph.from_edges(n, edges)
                c.expect(verify_policy(g, _leaves(g), policy_tree_bodyguards(g)).ok, f"tree policy fails on labeled {edges}")
        c.note(f"{len(classes)} classes covering {labeled} labeled trees, classes per n {per_n}")


def _leaves(g):
    return sum(1 for v in range(g.n) if g.degree(v) == 1)


def test_criterion_04_multipartite(report):
    with criterion(report, 4, "complete multipartite, <=7 vertices, >=2 parts", 120) as c:
        count = 0
        for total in range(2, 8):
            for parts in partitions(total, min_parts=2):
                g = generate_family("kpartite", list(parts))
                want = sum(parts[1:])
                got = number(g)
                c.expect(got == want, f"B(K{parts})={got}, want {want}")
                count += 1
        c.note(f"{count} partitions")


KNOWN_CONNECTED_LABELED = {1: 1, 2: 1, 3: 4, 4: 38, 5: 728, 6: 26704}


def test_criterion_05_dominating_vertex(report):
    with criterion(report, 5, "B = n-1 iff max degree n-1, all connected labeled n<=6", 1800) as c:
        for row in run_suite("exhaustive-n6"):
            counts = row["computed"]
            n = int(row["id"].rsplit("=", 1)[1])
            c.expect(row["status"] == "pass", f"n={n}: {counts}")
            c.expect(counts["graphs"] == KNOWN_CONNECTED_LABELED[n], f"n={n}: enumerated {counts['graphs']} graphs")
            c.note(f"n={n}: {counts['graphs']} graphs, {counts['maximal']} with B=n-1")


def test_criterion_06_figures(report):
    with criterion(report, 6, "figure graphs", 10) as c:
        fig1 = graph_from_spec(FIGURE1)
        c.expect(number(fig1) == 4, "B(figure 1) != 4")
        c.expect(FIGURE2.max_degree == 3, "figure 2 max degree != 3")
        c.expect(number(FIGURE2) == 3, "B(figure 2) != 3")


def test_criterion_07_grids(report):
    with criterion(report, 7, "cartesian grids", 35 * 60) as c:
        table = {(2, 2): 2, (2, 3): 3, (2, 4): 3, (2, 5): 3, (3, 3): 4, (3, 4): 4}
        for (a, b), want in table.items():
            got = number(graph_from_spec(f"cart(path:{a},path:{b})"))
            c.expect(got == want, f"B(P{a} box P{b})={got}, want {want}")
        g = graph_from_spec("cart(path:4,path:4)")
        with c.timed("P4xP4 k=4 exact", 300):
            c.expect(not decide(g, 4, SolveOptions(method="exact")).win, "P4 box P4 k=4 exact should lose")
        with c.timed("P4xP4 k=5 two-phase", 1800):
            c.expect(decide(g, 5, SolveOptions(method="two-phase")).win, "P4 box P4 k=5 two-phase should win")


def test_criterion_08_hypercube(report):
    with criterion(report, 8, "hypercube Q3 and evaders on Q3, Q4", 6 * 60) as c:
        with c.timed("B(Q3)", 60):
            c.expect(number(generate_family("hypercube", [3])) == 4, "B(Q3) != 4")
        with c.timed("evaders", 300):
            for d in (3, 4):
                verdict = verify_policy(generate_family("hypercube", [d]), d, evader_hypercube(d))
                c.expect(verdict.ok, f"evader fails on Q{d} against {d}")


def test_criterion_09_strong_grid(report):
    with criterion(report, 9, "strong grid P3 x P3: degree 8 and policy at k=8", 600) as c:
        g = graph_from_spec("strong(path:3,path:3)")
        c.expect(g.max_degree == 8, f"max degree {g.max_degree}")
        c.expect(decide(g, 7).win is False, "k=7 should be pruned as a loss")
        c.expect(verify_policy(g, 8, policy_strong_grid([3, 3])).ok, "strong-grid policy fails at k=8")
        c.expect(g.fingerprint == strong_grid([3, 3]).fingerprint, "policy graph differs from spec graph")


def test_criterion_10_inequalities(report):
    with criterion(report, 10, "inequality suite", 1800) as c:
        rows = run_suite("inequalities")
        c.expect(len(rows) <= 20, f"{len(rows)} registered instances")
        for row in rows:
            c.expect(row["status"] == "pass", f"{row['id']}: {row['computed']} ({row['status']})")
        c.note(f"{len(rows)} instances")


def _property_instances():
    graphs = [g for n in range(1, 6) for g in connected_labeled_graphs(n)]
    return graphs + isomorphism_classes(connected_labeled_graphs(6))


def test_criterion_11_properties(report):
    with criterion(report, 11, "property suites", 900) as c:
        rng = random.Random(11)

        # rank/unrank is a bijection onto sorted multisets
        for n in range(1, 9):
            for k in range(0, 5):
                total = placement_count(n, k)
                c.expect(total == comb(n + k - 1, k), f"count n={n} k={k}")
                seen = [unrank_placement(r, n, k) for r in range(total)]
                c.expect(set(seen) == set(combinations_with_replacement(range(n), k)), f"image n={n} k={k}")
                c.expect(all(rank_placement(p, n) == r for r, p in enumerate(seen)), f"rank o unrank n={n} k={k}")
                if k:
                    rows = np.array(seen, dtype=np.int64).reshape(total, k)
                    c.expect(np.array_equal(rank_rows(rows, n), np.arange(total)), f"rank_rows n={n} k={k}")

        # joint moves are symmetric and the sparse successor matrix agrees with matching
        symmetric_cases = [("cycle:6", 2), ("cart(path:3,path:3)", 3), ("tree:0-1;1-2;1-3;0-4;0-5", 3), ("kpartite:2,3", 3)]
        sym_graphs = [(graph_from_spec(s), k) for s, k in symmetric_cases] + [(FIGURE2, 3)]
        sym_graphs += [(g, 3) for g in rng.sample(list(connected_labeled_graphs(6)), 5)]
        for g, k in sym_graphs:
            arena = Arena(g, k)
            s = arena.successor_matrix
            c.expect((s != s.T).nnz == 0, f"successor matrix not symmetric on {g.fingerprint[:8]}")
            for _ in range(200):
                a = rng.randrange(arena.placement_total)
                b = rng.randrange(arena.placement_total)
                pa, pb = arena.placement(a), arena.placement(b)
                fwd = joint_move_feasible(g, pa, pb)
                c.expect(fwd == joint_move_feasible(g, pb, pa), f"asymmetric move {pa} {pb}")
                c.expect(fwd == bool(s[a, b]), f"matrix disagrees with matching at {pa} {pb}")

        # monotonicity in k, Attr(Core) inside the exact region, and certificates
        instances = _property_instances()
        solved = certified = 0
        # open question: is the exact region always Attr(Core)? counted, not assumed
        unequal = []
        for g in instances:
            wins = []
            for k in range(g.n):
                arena = Arena(g, k)
                region = cobuchi_region(arena)
                win = bool(region.members[:, :, 0].all(axis=1).any())
                wins.append(win)
                solved += 1
                core_attr = attractor(arena, eternal_core(arena))
                c.expect(not (core_attr & ~region.members).any(), f"Attr(Core) escapes exact region, k={k}, {g.fingerprint[:8]}")
                if not np.array_equal(core_attr, region.members):
                    unequal.append((g.fingerprint[:8], k))
                c.expect(decide(g, k).win == win, f"decide disagrees with unpruned solve, k={k}")
                if win:
                    witness = arena.placement(int(np.argmax(region.members[:, :, 0].all(axis=1))))
                    cert = certificate(extract_strategy(arena, region), witness)
                    check = verify_certificate(cert)
                    c.expect(check.ok, f"certificate rejected k={k} {g.fingerprint[:8]}: {check.problems[:2]}")
                    certified += 1
            c.expect(wins == sorted(wins), f"non-monotone wins {wins} on {g.fingerprint[:8]}")
        c.note(f"{len(instances)} graphs, {solved} solves, {certified} certificates")
        c.note(f"exact region != Attr(Core) on {len(unequal)} instances {unequal[:3]}")


def _suite_json(name, workers, tmp):
    path = os.path.join(tmp, f"{name}-{workers}.json")
    code = cli_main(["suite", name, "--workers", str(workers), "--out", path])
    with open(path) as fh:
        rows = json.load(fh)
    for row in rows:
        row.pop("meta", None)
    return code, json.dumps(rows, sort_keys=True)


def test_criterion_12_determinism(report, tmp_path, capsys):
    with criterion(report, 12, "suite JSON identical across worker counts", 1800) as c:
        many = max(2, min(4, os.cpu_count() or 2))
        for name in ("paper-values", "inequalities", "policies"):
            code_one, one = _suite_json(name, 1, str(tmp_path))
            code_many, other = _suite_json(name, many, str(tmp_path))
            c.expect(code_one == code_many == 0, f"{name}: exit codes {code_one}, {code_many}")
            c.expect(one == other, f"{name}: results differ between 1 and {many} workers")
        capsys.readouterr()
        c.note(f"workers 1 vs {many}")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    class _Capsys:
        def readouterr(self):
            return None

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_"):
            continue
        kwargs = {"report": print}
        if "tmp_path" in fn.__code__.co_varnames:
            kwargs.update(tmp_path=Path(tempfile.mkdtemp()), capsys=_Capsys())
        try:
            fn(**kwargs)
        except BaseException:  # pytest.fail raises an Exception subclass of BaseException
            failed += 1
    sys.exit(1 if failed else 0)
