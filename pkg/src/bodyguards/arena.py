"""Game positions, placement ranking and move generation.

A bodyguard placement is a sorted multiset of ``k`` vertex ids.  Placements are
ranked in lexicographic order through the combinatorial number system, which
lets a whole arena live in ``(placement rank, president)`` indexed arrays.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .graphs import Graph

__all__ = [
    "Turn",
    "GameState",
    "Arena",
    "StateLimitExceeded",
    "DEFAULT_STATE_LIMIT",
    "placement_count",
    "rank_placement",
    "unrank_placement",
    "surrounded",
    "president_moves",
    "joint_successors",
    "joint_move_feasible",
    "match_tokens",
    "build_arena",
    "placement_key",
    "parse_placement_key",
    "parse_state_key",
    "rank_rows",
]

DEFAULT_STATE_LIMIT = 50_000_000


class StateLimitExceeded(RuntimeError):
    def __init__(self, count: int, limit: int, what: str = "arena"):
        super().__init__(f"{what} needs {count} states, above the limit of {limit}")
        self.count = count
        self.limit = limit


class Turn(enum.IntEnum):
    BODYGUARDS = 0
    PRESIDENT = 1

    @property
    def letter(self) -> str:
        return "B" if self is Turn.BODYGUARDS else "P"


@dataclass(frozen=True)
class GameState:
    placement: tuple[int, ...]
    president: int
    turn: Turn

    def key(self) -> str:
        return f"placement={placement_key(self.placement)};president={self.president};turn={self.turn.letter}"


def placement_key(placement: Sequence[int]) -> str:
    return "[" + ",".join(str(int(t)) for t in placement) + "]"


def parse_placement_key(text: str) -> tuple[int, ...]:
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"bad placement key {text!r}")
    body = text[1:-1]
    return tuple(int(x) for x in body.split(",")) if body else ()


_STATE_KEY = re.compile(r"^placement=(\[[0-9,]*\]);president=(\d+);turn=([BP])$")


def parse_state_key(text: str) -> GameState:
    m = _STATE_KEY.match(text)
    if not m:
        raise ValueError(f"bad state key {text!r}")
    turn = Turn.BODYGUARDS if m.group(3) == "B" else Turn.PRESIDENT
    return GameState(parse_placement_key(m.group(1)), int(m.group(2)), turn)


# ---------------------------------------------------------------------------
# ranking


def placement_count(n: int, k: int) -> int:
    if n == 0:
        return 1 if k == 0 else 0
    return comb(n + k - 1, k)


def rank_placement(tokens: Sequence[int], n: int) -> int:
    """Lexicographic rank of a sorted multiset among all ``k``-multisets over ``range(n)``."""
    k = len(tokens)
    for i, t in enumerate(tokens):
        if not 0 <= t < n:
            raise ValueError(f"token {t} out of range for n={n}")
        if i and tokens[i - 1] > t:
            raise ValueError("placement tokens must be sorted")
    # t_i + i is a strictly increasing k-subset of range(n + k - 1)
    total = n + k - 1
    r = comb(total, k) - 1
    for i, t in enumerate(tokens):
        r -= comb(total - 1 - (t + i), k - i)
    return r


def unrank_placement(r: int, n: int, k: int) -> tuple[int, ...]:
    count = placement_count(n, k)
    if not 0 <= r < count:
        raise ValueError(f"rank {r} out of range [0, {count})")
    out = []
    low = 0
    for i in range(k):
        # first token value t >= low whose block contains r
        for t in range(low, n):
            block = comb(n - t + k - i - 2, k - i - 1)
            if r < block:
                out.append(t)
                low = t
                break
            r -= block
    return tuple(out)


@lru_cache(maxsize=64)
def _binomial_table(size: int, width: int) -> np.ndarray:
    cap = np.iinfo(np.int64).max // 4
    table = np.zeros((size + 1, width + 1), dtype=np.int64)
    for a in range(size + 1):
        for b in range(min(a, width) + 1):
            table[a, b] = min(comb(a, b), cap)
    table.setflags(write=False)
    return table


def rank_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`rank_placement` over the sorted rows of a 2-D array."""
    count, k = rows.shape
    if k == 0:
        return np.zeros(count, dtype=np.int64)
    total = n + k - 1
    table = _binomial_table(total, k)
    r = np.full(count, table[total, k] - 1, dtype=np.int64)
    for i in range(k):
        r -= table[total - 1 - (rows[:, i].astype(np.int64) + i), k - i]
    return r


# ---------------------------------------------------------------------------
# rules


def surrounded(g: Graph, placement: Iterable[int], president: int, mode: str = "open") -> bool:
    occupied = 0
    for t in placement:
        occupied |= 1 << t
    need = g.adj[president]
    if mode == "closed":
        need |= 1 << president
    elif mode != "open":
        raise ValueError(f"unknown mode {mode!r}")
    return need & ~occupied == 0


def president_moves(g: Graph, president: int) -> tuple[int, ...]:
    return g.closed_neighbors[president]


def joint_successors(g: Graph, placement: Sequence[int]) -> list[tuple[int, ...]]:
    """Distinct placements reachable in one bodyguard turn, sorted by rank."""
    partial: set[tuple[int, ...]] = {()}
    for t in placement:
        partial = {tuple(sorted(p + (w,))) for p in partial for w in g.closed_neighbors[t]}
    return sorted(partial)


def match_tokens(g: Graph, src: Sequence[int], dst: Sequence[int]) -> list[int] | None:
    """Assignment ``a`` with ``dst[a[i]]`` in ``N[src[i]]``, or ``None``.

    Augmenting-path bipartite matching; runs in ``O(k^3)``.
    """
    k = len(src)
    if len(dst) != k:
        raise ValueError("placements must have the same size")
    options = [[j for j in range(k) if dst[j] == s or g.has_edge(s, dst[j])] for s in src]
    owner = [-1] * k

    def augment(i: int, seen: list[bool]) -> bool:
        for j in options[i]:
            if not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    for i in range(k):
        if not augment(i, [False] * k):
            return None
    assign = [0] * k
    for j, i in enumerate(owner):
        assign[i] = j
    return assign


def joint_move_feasible(g: Graph, src: Sequence[int], dst: Sequence[int]) -> bool:
    return match_tokens(g, src, dst) is not None


# ---------------------------------------------------------------------------
# arena


class Arena:
    """All positions of the game on ``graph`` with ``k`` bodyguards.

    State id ``((rank * n) + president) * 2 + turn``; arrays indexed
    ``[rank, president]`` are the natural working form.
    """

    def __init__(self, graph: Graph, k: int, state_limit: int = DEFAULT_STATE_LIMIT):
        if k < 0:
            raise ValueError("k must be non-negative")
        self.graph = graph
        self.k = k
        self.n = graph.n
        self.placement_total = placement_count(self.n, k)
        self.state_count = self.placement_total * self.n * 2
        if self.state_count > state_limit:
            raise StateLimitExceeded(self.state_count, state_limit)
        self.state_limit = state_limit

    def __repr__(self) -> str:
        return f"Arena(n={self.n}, k={self.k}, states={self.state_count})"

    def state_id(self, state: GameState) -> int:
        r = rank_placement(state.placement, self.n)
        return (r * self.n + state.president) * 2 + int(state.turn)

    def state(self, sid: int) -> GameState:
        if not 0 <= sid < self.state_count:
            raise ValueError(f"state id {sid} out of range")
        rest, turn = divmod(sid, 2)
        r, v = divmod(rest, self.n)
        return GameState(self.placement(r), v, Turn(turn))

    def placement(self, r: int) -> tuple[int, ...]:
        if self.n and self.k:
            return tuple(int(t) for t in self.placements[r])
        return unrank_placement(r, self.n, self.k)

    def rank(self, placement: Sequence[int]) -> int:
        return rank_placement(placement, self.n)

    @cached_property
    def placements(self) -> np.ndarray:
        """All placements in rank order, shape ``(placement_total, k)``."""
        dtype = np.int16 if self.n < 2**15 else np.int32
        if self.k == 0:
            return np.zeros((self.placement_total, 0), dtype=dtype)
        flat = np.fromiter(
            (t for p in combinations_with_replacement(range(self.n), self.k) for t in p),
            dtype=dtype,
            count=self.placement_total * self.k,
        )
        return flat.reshape(self.placement_total, self.k)

    def successors(self, state: GameState) -> list[GameState]:
        if state.turn is Turn.BODYGUARDS:
            return [GameState(p, state.president, Turn.PRESIDENT) for p in joint_successors(self.graph, state.placement)]
        return [GameState(state.placement, v, Turn.BODYGUARDS) for v in president_moves(self.graph, state.president)]

    @cached_property
    def occupancy(self) -> np.ndarray:
        occ = np.zeros((self.placement_total, self.n), dtype=bool)
        if self.k:
            rows = np.repeat(np.arange(self.placement_total), self.k)
            occ[rows, self.placements.ravel()] = True
        return occ

    def surround_matrix(self, mode: str) -> np.ndarray:
        """``[rank, president]`` -> surrounded at the end of a bodyguard turn."""
        need = np.zeros((self.n, self.n), dtype=np.float32)
        for u, v in self.graph.edges:
            need[u, v] = need[v, u] = 1
        if mode == "closed":
            np.fill_diagonal(need, 1)
        elif mode != "open":
            raise ValueError(f"unknown mode {mode!r}")
        missing = (~self.occupancy).astype(np.float32) @ need
        return missing == 0

    @cached_property
    def closed_adjacency(self) -> np.ndarray:
        a = np.eye(self.n, dtype=np.float32)
        for u, v in self.graph.edges:
            a[u, v] = a[v, u] = 1
        return a

    @cached_property
    def successor_matrix(self) -> sp.csr_matrix:
        """Sparse ``[rank, rank']`` matrix of one-turn joint moves (symmetric)."""
        m = self.placement_total
        src, dst = _successor_pairs(self.graph, self.placements, self.k)
        indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=m), out=indptr[1:])
        data = np.ones(len(dst), dtype=np.float32)
        return sp.csr_matrix((data, dst.astype(np.int32), indptr), shape=(m, m))


def _successor_pairs(g: Graph, placements: np.ndarray, k: int, chunk_rows: int = 1 << 21):
    """(source rank, successor rank) pairs, unique and sorted.

    Tokens are added one at a time and the partial multisets deduplicated
    after every step, so the work is bounded by the number of distinct
    partial successors rather than by ``prod(deg + 1)``.
    """
    m = len(placements)
    n = g.n
    if k == 0 or n == 0:
        idx = np.arange(m, dtype=np.int64)
        return idx, idx
    width = max(len(c) for c in g.closed_neighbors)
    nb = np.array([c + (c[-1],) * (width - len(c)) for c in g.closed_neighbors], dtype=np.int64)
    estimate = max(1, min(width**k, placement_count(n, k)))
    step = max(1, chunk_rows // estimate)
    srcs, dsts = [], []
    for a in range(0, m, step):
        rows = np.arange(a, min(m, a + step), dtype=np.int64)
        partial = np.zeros((len(rows), 0), dtype=np.int64)
        for j in range(k):
            cand = nb[placements[rows, j]]
            grown = np.concatenate(
                [np.repeat(partial, width, axis=0), cand.reshape(-1, 1)], axis=1
            )
            grown.sort(axis=1)
            keys = np.repeat(rows, width) * placement_count(n, j + 1) + rank_rows(grown, n)
            keys, first = np.unique(keys, return_index=True)
            rows = keys // placement_count(n, j + 1)
            partial = grown[first]
        srcs.append(rows)
        dsts.append(rank_rows(partial, n))
    return np.concatenate(srcs), np.concatenate(dsts)


def build_arena(g: Graph, k: int, state_limit: int = DEFAULT_STATE_LIMIT) -> Arena:
    return Arena(g, k, state_limit)
