"""Exhaustive generators for the small-graph test suites."""

from __future__ import annotations

import heapq
from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np
from typing import Iterator

from .graphs import Graph

__all__ = [
    "labeled_graphs",
    "connected_labeled_graphs",
    "prufer_sequences",
    "prufer_to_edges",
    "labeled_trees",
    "tree_canonical_form",
    "graph_canonical_form",
    "isomorphism_classes",
    "partitions",
]


def labeled_graphs(n: int) -> Iterator[Graph]:
    """Every simple graph on vertex set ``range(n)``, by edge subset."""
    pairs = list(combinations(range(n), 2))
    bit = [(1 << v, 1 << u) for u, v in pairs]
    for subset in range(1 << len(pairs)):
        adj = [0] * n
        for i, (u, v) in enumerate(pairs):
            if subset >> i & 1:
                adj[u] |= bit[i][0]
                adj[v] |= bit[i][1]
        yield Graph(n, tuple(adj))


def connected_labeled_graphs(n: int) -> Iterator[Graph]:
    return (g for g in labeled_graphs(n) if g.is_connected())


def prufer_sequences(n: int, max_leaves: int | None = None) -> Iterator[tuple[int, ...]]:
    """Prüfer codes of labeled trees on ``n >= 2`` vertices.

    A tree has ``n - len(set(code))`` leaves, so the leaf filter needs no decoding.
    """
    for code in product(range(n), repeat=n - 2):
        if max_leaves is None or n - len(set(code)) <= max_leaves:
            yield code


def prufer_to_edges(code: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for v in code:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in code:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, w))
    return edges


def labeled_trees(n: int, max_leaves: int | None = None) -> Iterator[list[tuple[int, int]]]:
    for code in prufer_sequences(n, max_leaves):
        yield prufer_to_edges(code, n)


def tree_canonical_form(n: int, edges: list[tuple[int, int]]) -> str:
    """AHU encoding rooted at the centre (the smaller of two bicentre encodings)."""
    if n == 1:
        return "()"
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    degree = [len(x) for x in nbrs]
    layer = [v for v in range(n) if degree[v] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in nbrs[v]:
                degree[u] -= 1
                if degree[u] == 1:
                    nxt.append(u)
        layer = nxt

    def encode(root: int) -> str:
        order = [root]
        parent = {root: -1}
        for v in order:
            for u in nbrs[v]:
                if u != parent[v]:
                    parent[u] = v
                    order.append(u)
        code: dict[int, str] = {}
        for v in reversed(order):
            code[v] = "(" + "".join(sorted(code[u] for u in nbrs[v] if u != parent[v])) + ")"
        return code[root]

    return min(encode(c) for c in layer)


def partitions(total: int, min_parts: int = 1) -> Iterator[tuple[int, ...]]:
    """Non-decreasing integer partitions of ``total``."""

    def rec(rest: int, low: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(low, rest + 1):
            for tail in rec(rest - first, first):
                yield (first,) + tail

    return (p for p in rec(total, 1) if len(p) >= min_parts)


@lru_cache(maxsize=None)
def _relabelings(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per permutation, the edge-bit each pair maps to; plus the pair list."""
    pairs = list(combinations(range(n), 2))
    slot = {pq: i for i, pq in enumerate(pairs)}
    perms = list(permutations(range(n)))
    image = np.empty((len(perms), len(pairs)), dtype=np.int64)
    for a, perm in enumerate(perms):
        for i, (u, v) in enumerate(pairs):
            x, y = perm[u], perm[v]
            image[a, i] = slot[(min(x, y), max(x, y))]
    return image, np.array(pairs)


def graph_canonical_form(g: Graph) -> int:
    """Smallest edge-subset code over all relabelings; brute force, meant for ``n <= 7``."""
    if g.n > 7:
        raise ValueError("brute-force canonical form is limited to 7 vertices")
    image, pairs = _relabelings(g.n)
    if not len(pairs):
        return 0
    present = np.array([g.has_edge(int(u), int(v)) for u, v in pairs])
    weights = np.left_shift(np.int64(1), image[:, present])
    return int(weights.sum(axis=1).min())


def isomorphism_classes(graphs: Iterator[Graph]) -> list[Graph]:
    """First representative of every isomorphism class, in input order."""
    seen: dict[tuple[int, int], Graph] = {}
    for g in graphs:
        seen.setdefault((g.n, graph_canonical_form(g)), g)
    return list(seen.values())
