"""Command-line front end.

Exit status: 0 when an answer was computed, 1 on usage errors (bad flags,
bad graph spec, inapplicable policy), 2 when a state limit stopped the
computation, 3 when a check ran and failed (suite mismatch, rejected
certificate).  Results go to standard output as JSON; diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import __version__
from .arena import DEFAULT_STATE_LIMIT, StateLimitExceeded
from .cache import ResultCache
from .certificates import CertificateError, certificate, read_certificate, verify_certificate, write_certificate
from .graphs import Graph, GraphError, GraphSpec, build_graph, generate_family, parse_graph_spec
from .policies import (
    PolicyError,
    PresidentPolicy,
    evader_cycle,
    evader_hypercube,
    evader_tree,
    playout,
    policy_cycle_bodyguards,
    policy_multipartite,
    policy_strong_grid,
    policy_tree_bodyguards,
    policy_universal,
    president_best_response,
    president_greedy_escape,
    president_stay,
    verify_policy,
)
from .solver import BodyguardBracket, SolveOptions, cop_number, decide, extract_strategy
from .suites import SUITES, Solver, run_suite, summary_table

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_CHECK = 0, 1, 2, 3

BODYGUARD_POLICIES = ("universal", "multipartite", "tree", "cycle", "strong-grid")
PRESIDENT_POLICIES = ("evader-cycle", "evader-tree", "evader-hypercube")
ADVERSARIES = ("stay", "greedy-escape", "best-response", "random")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _load_graph(text: str) -> tuple[Graph, GraphSpec]:
    spec = parse_graph_spec(text)
    return build_graph(spec), spec


def _workers(args) -> int:
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        return args.workers
    return int(os.environ.get("BODYGUARDS_WORKERS", "1"))


def _options(args) -> SolveOptions:
    return SolveOptions(mode=args.mode, method=args.method, state_limit=args.state_limit, workers=_workers(args))


def _need_k(args) -> int:
    if args.k is None:
        raise UsageError("--k is required")
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    return args.k


def _multipartite_parts(g: Graph) -> list[int]:
    # non-adjacency is an equivalence relation exactly on complete multipartite graphs
    parts, seen = [], set()
    for v in range(g.n):
        if v in seen:
            continue
        block = [u for u in range(g.n) if u == v or not g.has_edge(u, v)]
        seen.update(block)
        parts.append(len(block))
    return sorted(parts)


def _strong_dims(spec: GraphSpec) -> list[int]:
    if spec.kind == "strong":
        return [d for child in spec.children for d in _strong_dims(child)]
    if spec.kind == "path":
        return [spec.params[0]]
    raise PolicyError("strong-grid policy needs a strong product of paths")


def bodyguard_policy(name: str, g: Graph, spec: GraphSpec, k: int):
    if name == "universal":
        return policy_universal(g, k)
    if name == "multipartite":
        return policy_multipartite(_multipartite_parts(g), k, graph=g)
    if name == "tree":
        return policy_tree_bodyguards(g, k)
    if name == "cycle":
        if g.n < 3 or g != generate_family("cycle", [g.n]):
            raise PolicyError("cycle policy needs the graph cycle:n")
        return policy_cycle_bodyguards(g.n, k)
    if name == "strong-grid":
        return policy_strong_grid(_strong_dims(spec), k, graph=g)
    raise UsageError(f"unknown bodyguard policy {name!r}; choose from {', '.join(BODYGUARD_POLICIES)}")


def president_policy(name: str, g: Graph, spec: GraphSpec, k: int, args=None) -> PresidentPolicy:
    if name == "evader-cycle":
        if g.n < 3 or g != generate_family("cycle", [g.n]):
            raise PolicyError("evader-cycle needs the graph cycle:n")
        return evader_cycle(g.n, k)
    if name == "evader-tree":
        return evader_tree(g, k)
    if name == "evader-hypercube":
        d = g.n.bit_length() - 1
        if g.n < 2 or g != generate_family("hypercube", [d]):
            raise PolicyError("evader-hypercube needs the graph hypercube:d")
        return evader_hypercube(d, k)
    if name == "stay":
        return president_stay(g)
    if name == "greedy-escape":
        return president_greedy_escape(g)
    if name == "random":
        rng = random.Random(args.seed if args is not None else 0)
        return PresidentPolicy(
            "random", g, None,
            lambda placement: rng.randrange(g.n),
            lambda placement, v: rng.choice(g.closed_neighbors[v]),
        )
    if name == "best-response":
        d = decide(g, k, _options(args))
        if d.region is None:
            # below the max degree the solver never builds an arena; park on the hub
            hub = d.escape_vertex
            return PresidentPolicy("best-response", g, k, lambda placement: hub, lambda placement, v: v)
        return president_best_response(d.region)
    raise UsageError(f"unknown president policy {name!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args) -> int:
    g, _ = _load_graph(args.graph)
    k = _need_k(args)
    cache = ResultCache(args.cache_dir) if args.cache_dir else None
    value = Solver(_workers(args), cache, args.state_limit).decide(g, k, args.mode, args.method)
    _emit(value)
    return EXIT_OK


def cmd_number(args) -> int:
    g, _ = _load_graph(args.graph)
    cache = ResultCache(args.cache_dir) if args.cache_dir else None
    solver = Solver(_workers(args), cache, args.state_limit)
    try:
        b = solver.number(g, args.mode, args.method)
    except StateLimitExceeded as exc:
        bracket = [exc.low, exc.high] if isinstance(exc, BodyguardBracket) else None
        _emit({"B": None, "bracket": bracket})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit({"B": b, "bracket": None})
    return EXIT_OK


def cmd_strategy(args) -> int:
    g, _ = _load_graph(args.graph)
    k = _need_k(args)
    if not args.out:
        raise UsageError("strategy needs --out PATH for the certificate")
    d = decide(g, k, _options(args))
    if not d.win:
        _emit({"win": False, "certificate": None})
        return EXIT_OK
    if d.region is None:
        # empty board: nothing to certify beyond the trivial witness
        _emit({"win": True, "certificate": None})
        return EXIT_OK
    cert = certificate(extract_strategy(d.region.arena, d.region), d.witness)
    write_certificate(cert, args.out)
    _emit({"win": True, "certificate": str(args.out), "states": len(cert["moves"])})
    return EXIT_OK


def cmd_copnumber(args) -> int:
    g, _ = _load_graph(args.graph)
    _emit({"c": cop_number(g, args.state_limit, _workers(args))})
    return EXIT_OK


def cmd_verify_policy(args) -> int:
    g, spec = _load_graph(args.graph)
    k = _need_k(args)
    if args.policy in BODYGUARD_POLICIES:
        policy = bodyguard_policy(args.policy, g, spec, k)
    elif args.policy in PRESIDENT_POLICIES:
        policy = president_policy(args.policy, g, spec, k)
    else:
        raise UsageError(f"unknown policy {args.policy!r}")
    verdict = verify_policy(g, k, policy, args.mode, args.state_limit)
    words = {("bodyguards", True): "winning", ("bodyguards", False): "losing",
             ("president", True): "evading", ("president", False): "caught"}
    report = {"policy": policy.id, "role": verdict.role, "ok": verdict.ok,
              "verdict": words[(verdict.role, verdict.ok)], "states": verdict.states, "witness": None}
    if verdict.witness is not None and args.out:
        Path(args.out).write_text("".join(json.dumps({"state": s.key()}) + "\n" for s in verdict.witness))
        report["witness"] = str(args.out)
    _emit(report)
    return EXIT_OK


def cmd_play(args) -> int:
    g, spec = _load_graph(args.graph)
    k = _need_k(args)
    if args.bodyguards not in BODYGUARD_POLICIES:
        raise UsageError(f"--bodyguards must be one of {', '.join(BODYGUARD_POLICIES)}")
    if args.president not in PRESIDENT_POLICIES + ADVERSARIES:
        raise UsageError(f"--president must be one of {', '.join(PRESIDENT_POLICIES + ADVERSARIES)}")
    bg = bodyguard_policy(args.bodyguards, g, spec, k)
    pres = president_policy(args.president, g, spec, k, args)
    result = playout(g, k, bg, pres, args.steps, args.mode)
    if args.out:
        Path(args.out).write_text(result.transcript())
    tail = result.tail_surrounded()
    _emit({
        "reason": result.reason,
        "turns": len(result.surrounded),
        "loop_start": result.loop_start,
        "surrounded": result.surrounded,
        "tail_all_surrounded": bool(tail) and all(tail),
        "transcript": str(args.out) if args.out else None,
    })
    return EXIT_OK


def cmd_suite(args) -> int:
    cache = ResultCache(args.cache_dir) if args.cache_dir else None
    results = run_suite(args.name, Solver(_workers(args), cache, args.state_limit))
    text = json.dumps(results, sort_keys=True, indent=1) + "\n"
    table = summary_table(results)
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)
        sys.stderr.write(table)
    return EXIT_CHECK if any(r["status"] == "fail" for r in results) else EXIT_OK


def cmd_verify_certificate(args) -> int:
    report = verify_certificate(read_certificate(args.path))
    _emit({"ok": report.ok, "problems": report.problems, "states": report.states})
    return EXIT_OK if report.ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--mode", choices=("open", "closed"), default="open")
    common.add_argument("--method", choices=("exact", "two-phase"), default="exact")
    common.add_argument("--state-limit", type=int, default=DEFAULT_STATE_LIMIT)
    common.add_argument("--workers", type=int, default=None, help="default: $BODYGUARDS_WORKERS or 1")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--cache-dir", default=None)

    parser = _Parser(prog="bodyguards", description="Solve and verify the bodyguards and presidents game.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text, graph=True, k=False):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if graph:
            p.add_argument("--graph", required=True)
        if k:
            p.add_argument("--k", type=int, required=k == "required")
        p.set_defaults(func=func)
        return p

    add("decide", cmd_decide, "decide whether k bodyguards win", k="required")
    add("number", cmd_number, "compute the bodyguard number")
    add("strategy", cmd_strategy, "write a strategy certificate", k="required")
    add("copnumber", cmd_copnumber, "compute the cop number")
    p = add("verify-policy", cmd_verify_policy, "model-check a scripted policy", k="required")
    p.add_argument("--policy", required=True)
    p = add("play", cmd_play, "simulate two policies", k="required")
    p.add_argument("--bodyguards", required=True)
    p.add_argument("--president", required=True)
    p.add_argument("--steps", type=int, default=1000)
    p = add("suite", cmd_suite, "run a registered suite", graph=False)
    p.add_argument("name", choices=tuple(SUITES))
    p = add("verify-certificate", cmd_verify_certificate, "re-check a certificate file", graph=False)
    p.add_argument("path")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        if args.state_limit < 1:
            raise UsageError("--state-limit must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, PolicyError, CertificateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
