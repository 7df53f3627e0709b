"""Strategy certificates: export a solved strategy to JSON and re-check it offline.

A certificate lists one joint move per bodyguard-to-move state reachable from
the witness placement under the strategy.  Checking it needs only the graph:
every move must be a legal joint move, every president reply must land on a
state that again has a move, and no cycle of the induced play graph may pass
through an unsurrounded president-to-move state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import __version__
from .arena import (
    Turn,
    joint_move_feasible,
    parse_placement_key,
    parse_state_key,
    placement_key,
    surrounded,
    GameState,
)
from .graphs import Graph, GraphError
from .solver import Strategy

__all__ = ["CertificateError", "CheckReport", "certificate", "write_certificate", "read_certificate", "verify_certificate"]

FORMAT_VERSION = 1


class CertificateError(ValueError):
    pass


def certificate(strategy: Strategy, witness: tuple[int, ...]) -> dict:
    """JSON-ready certificate for the part of ``strategy`` reachable from ``witness``."""
    arena, region = strategy.arena, strategy.region
    g, n = arena.graph, arena.graph.n
    start = arena.rank(tuple(witness))
    moves = strategy.moves
    if (moves[start] < 0).any():
        raise CertificateError("witness placement is not winning against every president start")
    seen = np.zeros((arena.placement_total, n), dtype=bool)
    seen[start] = True
    stack = [(start, v) for v in range(n)]
    order = []
    while stack:
        r, v = stack.pop()
        order.append((r, v))
        nxt = int(moves[r, v])
        for u in g.closed_neighbors[v]:
            if not seen[nxt, u]:
                seen[nxt, u] = True
                stack.append((nxt, u))
    order.sort()
    entries = {}
    for r, v in order:
        key = GameState(arena.placement(r), v, Turn.BODYGUARDS).key()
        entries[key] = placement_key(arena.placement(int(moves[r, v])))
    core_p = region.core[:, :, 1]
    core = sorted(
        {int(moves[r, v]) * n + v for r, v in order if core_p[moves[r, v], v]}
    )
    return {
        "version": FORMAT_VERSION,
        "solver": __version__,
        "graph": g.to_json(),
        "fingerprint": g.fingerprint,
        "k": arena.k,
        "mode": region.mode,
        "method": region.method,
        "witness_placement": list(witness),
        "core": [GameState(arena.placement(x // n), x % n, Turn.PRESIDENT).key() for x in core],
        "moves": entries,
    }


def write_certificate(cert: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cert, sort_keys=True) + "\n")


def read_certificate(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CertificateError(f"cannot read certificate {path}: {exc}") from exc


@dataclass
class CheckReport:
    ok: bool
    problems: list[str]
    states: int


def verify_certificate(cert: dict) -> CheckReport:
    """Re-check legality, closure and the eventually-always-surrounded objective."""
    problems: list[str] = []
    try:
        spec = cert["graph"]
        g = Graph.from_edges(spec["n"], [tuple(e) for e in spec["edges"]])
        k, mode = int(cert["k"]), cert["mode"]
        witness = tuple(cert["witness_placement"])
        raw_moves = cert["moves"]
    except (KeyError, TypeError, ValueError, GraphError) as exc:
        return CheckReport(False, [f"malformed certificate: {exc}"], 0)
    if cert.get("fingerprint") != g.fingerprint:
        problems.append("fingerprint does not match the graph")
    if len(witness) != k or list(witness) != sorted(witness):
        problems.append("witness placement is not a sorted k-multiset")
    moves: dict[tuple[tuple[int, ...], int], tuple[int, ...]] = {}
    for key, target in raw_moves.items():
        try:
            state = parse_state_key(key)
            after = parse_placement_key(target)
        except ValueError as exc:
            problems.append(str(exc))
            continue
        if state.turn is not Turn.BODYGUARDS:
            problems.append(f"move listed at a president-to-move state {key}")
            continue
        if len(state.placement) != k or len(after) != k:
            problems.append(f"wrong token count at {key}")
            continue
        if not joint_move_feasible(g, state.placement, after):
            problems.append(f"illegal joint move at {key}")
            continue
        moves[(state.placement, state.president)] = after
    if problems:
        return CheckReport(False, problems, len(moves))

    # play graph over the president-to-move states reached by the strategy
    index: dict[tuple[tuple[int, ...], int], int] = {}
    src, dst = [], []

    def node(placement: tuple[int, ...], v: int) -> int | None:
        after = moves.get((placement, v))
        if after is None:
            problems.append(f"no move for reachable state {GameState(placement, v, Turn.BODYGUARDS).key()}")
            return None
        return index.setdefault((after, v), len(index))

    for v in range(g.n):
        node(witness, v)
    todo = list(index)
    done = 0
    while done < len(todo) and not problems:
        placement, v = todo[done]
        here = index[(placement, v)]
        done += 1
        for u in g.closed_neighbors[v]:
            before = len(index)
            there = node(placement, u)
            if there is None:
                break
            src.append(here)
            dst.append(there)
            if len(index) > before:
                todo.append(next(reversed(index)))
    if problems:
        return CheckReport(False, problems[:20], len(index))
    nodes = list(index)
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(len(nodes), len(nodes))).tocsr()
    _, labels = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(labels)
    cyclic = sizes[labels] > 1
    loops = np.array(src)[np.array(src) == np.array(dst)] if src else np.array([], dtype=int)
    cyclic[loops] = True
    for i in np.flatnonzero(cyclic):
        placement, v = nodes[i]
        if not surrounded(g, placement, v, mode):
            problems.append(f"unsurrounded state {GameState(placement, v, Turn.PRESIDENT).key()} recurs")
            break
    return CheckReport(not problems, problems, len(nodes))
