"""Registered reproduction suites.

A suite is an ordered list of cases.  Each case computes one value and
compares it with an expected value carrying a provenance tag.  Results are
plain dicts; wall time lives under ``meta`` so that everything else is
byte-identical between runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable

from .arena import StateLimitExceeded
from .cache import ResultCache
from .enumeration import connected_labeled_graphs
from .graphs import Graph, RetractionMap, graph_from_spec, is_retraction
from .policies import (
    evader_cycle,
    evader_hypercube,
    evader_tree,
    policy_cycle_bodyguards,
    policy_multipartite,
    policy_strong_grid,
    policy_tree_bodyguards,
    policy_universal,
    verify_policy,
)
from .solver import BodyguardBracket, SolveOptions, cop_number, decide

__all__ = ["Case", "SUITES", "FIGURE1", "FIGURE2", "run_suite", "summary_table", "Solver"]

FIGURE1 = "tree:0-1;1-2;1-3;0-4;0-5"
# v1..v6 relabeled 0..5
FIGURE2_EDGES = [(4, 1), (1, 0), (0, 3), (3, 4), (0, 2), (2, 5), (3, 5)]
FIGURE2 = Graph.from_edges(6, FIGURE2_EDGES)


class Solver:
    """Decisions and bodyguard numbers, optionally memoized in a :class:`ResultCache`."""

    def __init__(self, workers: int = 1, cache: ResultCache | None = None, state_limit: int | None = None):
        self.workers = workers
        self.cache = cache
        self.state_limit = state_limit

    def options(self, mode: str = "open", method: str = "exact") -> SolveOptions:
        extra = {} if self.state_limit is None else {"state_limit": self.state_limit}
        return SolveOptions(mode=mode, method=method, workers=self.workers, **extra)

    def decide(self, g: Graph, k: int, mode: str = "open", method: str = "exact") -> dict:
        if self.cache is not None:
            hit = self.cache.get(g.fingerprint, k, mode, method)
            if hit is not None:
                return hit
        d = decide(g, k, self.options(mode, method))
        value = {"win": d.win, "witness": list(d.witness) if d.witness is not None else None}
        if self.cache is not None:
            self.cache.put(g.fingerprint, k, mode, method, value)
        return value

    def number(self, g: Graph, mode: str = "open", method: str = "exact") -> int:
        if g.n == 0:
            return 0
        high = g.n - 1 if mode == "open" else g.n
        for k in range(g.max_degree, high + 1):
            try:
                if self.decide(g, k, mode, method)["win"]:
                    return k
            except StateLimitExceeded as exc:
                raise BodyguardBracket(k, high, exc) from exc
        raise AssertionError(f"no win found up to k={high}")

    def cops(self, g: Graph) -> int:
        return cop_number(g, workers=self.workers, **({"state_limit": self.state_limit} if self.state_limit else {}))


@dataclass(frozen=True)
class Case:
    id: str
    spec: str
    expected: object
    provenance: str
    method: str
    compute: Callable[[Solver], object]
    accept: Callable[[object], bool] | None = None

    def check(self, value) -> bool:
        if self.accept is not None:
            return self.accept(value)
        return value == self.expected


def _number(spec: str, expected: int, provenance: str, mode: str = "open") -> Case:
    name = "B" if mode == "open" else "B_closed"
    return Case(f"{name}({spec})", spec, expected, provenance, "exact", lambda s: s.number(graph_from_spec(spec), mode))


def _decision(spec: str, k: int, expected: bool, provenance: str, method: str = "exact") -> Case:
    return Case(
        f"decide({spec}, k={k}, {method})",
        spec,
        expected,
        provenance,
        method,
        lambda s: s.decide(graph_from_spec(spec), k, method=method)["win"],
    )


def reference_values() -> list[Case]:
    cases = []
    for n in (3, 4, 5):
        cases.append(_number(f"cycle:{n}", 2, "published: small cycles need two bodyguards"))
    for n in (6, 7, 8):
        cases.append(_number(f"cycle:{n}", 3, "published: cycles longer than five need three"))
    cases.append(_number("path:2", 1, "published: value one only for P2"))
    for n in range(3, 9):
        cases.append(_number(f"path:{n}", 2, "published: paths have two leaves"))
    cases.append(_number("complete:4", 3, "published: n - 1 iff a dominating vertex"))
    cases.append(_number("star:5", 4, "published: n - 1 iff a dominating vertex"))
    cases.append(_number("wheel:6", 5, "published: n - 1 iff a dominating vertex"))
    cases.append(_number("kpartite:2,3", 3, "published: sum of all parts but the smallest"))
    cases.append(_number("kpartite:1,2,3", 5, "published: sum of all parts but the smallest"))
    cases.append(_number("kpartite:2,2,2", 4, "published: sum of all parts but the smallest"))
    cases.append(_number(FIGURE1, 4, "published: trees need one bodyguard per leaf (Figure 1 graph)"))
    cases.append(
        Case("B(figure-2)", "file:data/figure2.json", 3, "published: Figure 2 graph, upper bound 3 and max degree 3", "exact",
             lambda s: s.number(FIGURE2))
    )
    cases.append(_number("tree:0-1;1-2;0-3;3-4;0-5;5-6", 3, "published: trees, spider with three legs"))
    cases.append(_number("cart(path:2,path:2)", 2, "published: grid table"))
    for m in (3, 4, 5):
        cases.append(_number(f"cart(path:2,path:{m})", 3, "published: grid table"))
    for m in (3, 4):
        cases.append(_number(f"cart(path:3,path:{m})", 4, "published: grid table"))
    cases.append(_decision("cart(path:4,path:4)", 4, False, "published: grid table, value 5 when both sides >= 4"))
    cases.append(
        _decision("cart(path:4,path:4)", 5, True, "published: grid table, value 5 when both sides >= 4", "two-phase")
    )
    cases.append(_number("hypercube:3", 4, "published: hypercube bounds coincide at dimension 3"))
    return cases


def _exhaustive(n: int) -> Case:
    def run(s: Solver) -> dict:
        counts = {"graphs": 0, "dominating": 0, "maximal": 0, "violations": 0, "below_max_degree": 0}
        for g in connected_labeled_graphs(n):
            b = s.number(g) if n > 1 else 0
            dom, top = g.max_degree == n - 1, b == n - 1
            counts["graphs"] += 1
            counts["dominating"] += dom
            counts["maximal"] += top
            counts["violations"] += dom != top
            counts["below_max_degree"] += b < g.max_degree
        return counts

    return Case(
        f"n-1 iff dominating, n={n}",
        f"all connected labeled graphs on {n} vertices",
        "no violations",
        "published: B = n - 1 iff max degree n - 1; lower bound max degree",
        "exact",
        run,
        lambda c: c["violations"] == 0 and c["below_max_degree"] == 0,
    )


def exhaustive_n6() -> list[Case]:
    return [_exhaustive(n) for n in range(1, 7)]


def _bound(case_id: str, spec: str, provenance: str, compute: Callable[[Solver], tuple[int, int]]) -> Case:
    """``compute`` returns (lhs, rhs); the case passes iff lhs <= rhs."""
    return Case(
        case_id,
        spec,
        "lhs <= rhs",
        provenance,
        "exact",
        lambda s: dict(zip(("lhs", "rhs"), compute(s))),
        lambda v: v["lhs"] <= v["rhs"],
    )


def _cartesian(gs: str, hs: str) -> Case:
    spec = f"cart({gs},{hs})"

    def go(s: Solver):
        gh = graph_from_spec(spec)
        return s.number(gh), s.number(graph_from_spec(gs)) + s.number(graph_from_spec(hs)) + s.cops(gh) - 1

    return _bound(f"cartesian bound {spec}", spec, "published: B(G box H) <= B(G) + B(H) + c(G box H) - 1", go)


def _strong(gs: str, hs: str) -> Case:
    spec = f"strong({gs},{hs})"

    def go(s: Solver):
        g, h = graph_from_spec(gs), graph_from_spec(hs)
        cg, ch = s.cops(g), s.cops(h)
        if cg > ch:
            g, h, cg, ch = h, g, ch, cg
        bg, bh = s.number(g), s.number(h)
        return s.number(graph_from_spec(spec)), bg * (bh + 1) + bh + cg - 1

    return _bound(f"strong bound {spec}", spec, "published: B(G x H) <= B(G)(B(H)+1) + B(H) + c(G) - 1 when c(G) <= c(H)", go)


def _lex(gs: str, hs: str) -> Case:
    spec = f"lex({gs},{hs})"

    def go(s: Solver):
        g, h = graph_from_spec(gs), graph_from_spec(hs)
        bg, bh, cg, ch = s.number(g), s.number(h), s.cops(g), s.cops(h)
        rhs = min(bg * h.n + bh + cg - 1, bh * g.n + bg + ch - 1)
        return s.number(graph_from_spec(spec)), rhs

    return _bound(f"lexicographic bound {spec}", spec, "published: lexicographic product bound", go)


def _retract(spec: str, target: tuple[int, ...], mapping: tuple[int, ...]) -> Case:
    def go(s: Solver):
        g = graph_from_spec(spec)
        r = RetractionMap(g, frozenset(target), mapping)
        if not is_retraction(r):
            raise AssertionError("registered map is not a retraction")
        return s.number(r.target_graph()), s.number(g)

    return _bound(f"retract bound {spec} -> {sorted(target)}", spec, "published: B(H) <= B(G) for a retract H", go)


def _sandwich(spec: str) -> Case:
    def go(s: Solver):
        g = graph_from_spec(spec)
        return s.number(g), s.number(g, "closed")

    return Case(
        f"closed sandwich {spec}",
        spec,
        "B <= B_closed <= B + 1",
        "published: closed-neighbourhood variant",
        "exact",
        lambda s: dict(zip(("B", "B_closed"), go(s))),
        lambda v: v["B"] <= v["B_closed"] <= v["B"] + 1,
    )


def _cop_strong(gs: str, hs: str) -> Case:
    spec = f"strong({gs},{hs})"

    def go(s: Solver):
        return s.cops(graph_from_spec(spec)), s.cops(graph_from_spec(gs)) + s.cops(graph_from_spec(hs)) - 1

    return _bound(f"cop bound {spec}", spec, "cited: c(G x H) <= c(G) + c(H) - 1", go)


def _grid_two_dim(spec: str, fits: Callable[[Solver], tuple[int, int]]) -> Case:
    return _bound(f"2-dim grid bound {spec}", spec, "published: grids of dimension k need at most floor(5k/2)", fits)


def inequalities() -> list[Case]:
    return [
        _cartesian("path:2", "path:3"),
        _cartesian("path:3", "path:3"),
        _cartesian("cycle:4", "path:2"),
        _cartesian("star:4", "path:2"),
        _strong("path:2", "path:3"),
        _strong("path:2", "cycle:4"),
        _strong("path:2", "path:4"),
        _lex("path:2", "path:3"),
        _lex("path:3", "path:2"),
        _lex("cycle:4", "path:2"),
        _retract("cycle:4", (0, 1, 2), (0, 1, 2, 1)),
        _retract("cart(path:2,path:3)", (0, 1, 2), (0, 1, 2, 0, 1, 2)),
        _retract("tree:0-1;1-2;2-3;1-4;4-5", (0, 1, 2, 3), (0, 1, 2, 3, 0, 1)),
        _grid_two_dim("cart(path:3,path:4)", lambda s: (s.number(graph_from_spec("cart(path:3,path:4)")), 5)),
        _grid_two_dim(
            "cart(path:4,path:4)",
            lambda s: (5 if s.decide(graph_from_spec("cart(path:4,path:4)"), 5, method="two-phase")["win"] else 6, 5),
        ),
        _sandwich("cycle:6"),
        _sandwich("path:4"),
        _sandwich("complete:4"),
        _cop_strong("cycle:4", "cycle:4"),
        _cop_strong("path:3", "cycle:5"),
    ]


def _policy(case_id: str, spec: str, k: int, build: Callable[[], object], expected: bool, provenance: str) -> Case:
    return Case(case_id, spec, expected, provenance, "policy",
                lambda s: verify_policy(graph_from_spec(spec), k, build()).ok)


def policies() -> list[Case]:
    spider = "tree:0-1;1-2;0-3;3-4;0-5;5-6"
    return [
        _policy("universal complete:4", "complete:4", 3, lambda: policy_universal(graph_from_spec("complete:4")), True,
                "published: n - 1 bodyguards always win"),
        _policy("universal cycle:5", "cycle:5", 4, lambda: policy_universal(graph_from_spec("cycle:5")), True,
                "derived: more tokens than needed"),
        _policy("universal path:4", "path:4", 3, lambda: policy_universal(graph_from_spec("path:4")), True,
                "derived: SCC check"),
        _policy("multipartite 2,3", "kpartite:2,3", 3, lambda: policy_multipartite([2, 3]), True,
                "published: complete multipartite strategy"),
        _policy("multipartite 1,2,3", "kpartite:1,2,3", 5, lambda: policy_multipartite([1, 2, 3]), True,
                "published: complete multipartite strategy"),
        _policy("tree figure-1", FIGURE1, 4, lambda: policy_tree_bodyguards(graph_from_spec(FIGURE1)), True,
                "published: tree strategy"),
        _policy("tree spider", spider, 3, lambda: policy_tree_bodyguards(graph_from_spec(spider)), True,
                "published: tree strategy"),
        _policy("cycle:5 k=2", "cycle:5", 2, lambda: policy_cycle_bodyguards(5), True, "published: small cycles"),
        _policy("cycle:8 k=3", "cycle:8", 3, lambda: policy_cycle_bodyguards(8), True, "published: long cycles"),
        _policy("cycle:8 k=2", "cycle:8", 2, lambda: policy_cycle_bodyguards(8, 2), False,
                "published: two bodyguards lose on long cycles"),
        _policy("strong-grid 3x3", "strong(path:3,path:3)", 8, lambda: policy_strong_grid([3, 3]), True,
                "published: strong grids need 3^d - 1"),
        _policy("strong-grid 3x4", "strong(path:3,path:4)", 11, lambda: policy_strong_grid([3, 4], 11), True,
                "published: strong grids need 3^d - 1"),
        _policy("evader cycle:6", "cycle:6", 2, lambda: evader_cycle(6), True, "published: distance three on cycles"),
        _policy("evader cycle:10", "cycle:10", 2, lambda: evader_cycle(10), True, "published: distance three on cycles"),
        _policy("evader spider", spider, 2, lambda: evader_tree(graph_from_spec(spider)), True,
                "published: fewer bodyguards than leaves lose"),
        _policy("evader figure-1", FIGURE1, 3, lambda: evader_tree(graph_from_spec(FIGURE1)), True,
                "published: fewer bodyguards than leaves lose"),
        _policy("evader path:5", "path:5", 1, lambda: evader_tree(graph_from_spec("path:5")), True,
                "published: paths need two"),
        _policy("evader hypercube:3", "hypercube:3", 3, lambda: evader_hypercube(3), True,
                "published: hypercube lower bound d + 1"),
        _policy("evader hypercube:4", "hypercube:4", 4, lambda: evader_hypercube(4), True,
                "published: hypercube lower bound d + 1"),
    ]


SUITES: dict[str, Callable[[], list[Case]]] = {
    "paper-values": reference_values,
    "exhaustive-n6": exhaustive_n6,
    "inequalities": inequalities,
    "policies": policies,
}


def run_suite(name: str, solver: Solver | None = None) -> list[dict]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    solver = solver or Solver()
    results = []
    for case in SUITES[name]():
        start = time.perf_counter()
        row = {
            "id": case.id,
            "spec": case.spec,
            "expected": case.expected,
            "provenance": case.provenance,
            "method": case.method,
        }
        try:
            value = case.compute(solver)
        except StateLimitExceeded as exc:
            row.update(computed=None, status="skipped", reason=str(exc))
        else:
            row.update(computed=value, status="pass" if case.check(value) else "fail")
        row["meta"] = {"seconds": round(time.perf_counter() - start, 3)}
        results.append(row)
    return results


def _cell(value) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"), sort_keys=True)
    return str(value)


def summary_table(results: list[dict]) -> str:
    rows = [(r["id"], _cell(r["expected"]), _cell(r["computed"]), r["status"]) for r in results]
    head = ("case", "expected", "computed", "status")
    widths = [max([len(head[i])] + [len(row[i]) for row in rows]) for i in range(3)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)) + "  " + head[3]]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)) + "  " + row[3])
    counts = {s: sum(r["status"] == s for r in results) for s in ("pass", "fail", "skipped")}
    lines.append(f"pass {counts['pass']}  fail {counts['fail']}  skipped {counts['skipped']}")
    return "\n".join(line.rstrip() for line in lines) + "\n"
