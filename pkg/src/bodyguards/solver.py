"""Winning regions, decisions and strategies for the eventually-always-surround game.

All fixpoints operate on boolean arrays indexed ``[placement rank, president]``,
one per side to move.  A bodyguard-to-move step is a sparse product with the
joint-move matrix; a president-to-move step is a product with the closed
adjacency matrix of the board.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arena import (
    DEFAULT_STATE_LIMIT,
    Arena,
    GameState,
    StateLimitExceeded,
    Turn,
)
from .graphs import Graph

__all__ = [
    "SolveOptions",
    "WinRegion",
    "Decision",
    "Strategy",
    "BodyguardBracket",
    "safe_set",
    "eternal_core",
    "attractor",
    "cobuchi_region",
    "two_phase_region",
    "solve_region",
    "decide",
    "bodyguard_number",
    "extract_strategy",
    "best_response_president",
    "cop_decide",
    "cop_number",
]

EXACT = "exact"
TWO_PHASE = "two-phase"
METHODS = (EXACT, TWO_PHASE)
MODES = ("open", "closed")


def _default_workers() -> int:
    return max(1, int(os.environ.get("BODYGUARDS_WORKERS", "1")))


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "open"
    method: str = EXACT
    state_limit: int = DEFAULT_STATE_LIMIT
    workers: int = field(default_factory=_default_workers)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


class BodyguardBracket(StateLimitExceeded):
    """The search for B(G) hit the state limit; B lies in ``[low, high]``."""

    def __init__(self, low: int, high: int, cause: StateLimitExceeded):
        RuntimeError.__init__(self, f"B lies in [{low}, {high}]; {cause}")
        self.low, self.high = low, high
        self.count, self.limit = cause.count, cause.limit


# ---------------------------------------------------------------------------
# one-step predecessor operators


class _Ops:
    def __init__(self, arena: Arena, workers: int = 1):
        self.arena = arena
        self.moves = arena.successor_matrix
        self.closed = arena.closed_adjacency
        self.workers = workers
        m = arena.placement_total
        if workers > 1 and m >= 4 * workers:
            cuts = np.linspace(0, m, workers + 1).astype(int)
            self.blocks = [self.moves[a:b] for a, b in zip(cuts[:-1], cuts[1:])]
            self.pool = ThreadPoolExecutor(workers)
        else:
            self.blocks = None
            self.pool = None

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()

    def pre_bodyguards(self, target_p: np.ndarray) -> np.ndarray:
        """Bodyguard-to-move states with some joint move into ``target_p``."""
        y = target_p.astype(np.float32)
        if self.blocks is None:
            return (self.moves @ y) > 0
        parts = self.pool.map(lambda blk: (blk @ y) > 0, self.blocks)
        return np.vstack(list(parts))

    def pre_president(self, target_b: np.ndarray) -> np.ndarray:
        """President-to-move states all of whose moves land in ``target_b``."""
        escapes = (~target_b).astype(np.float32) @ self.closed
        return escapes == 0


def _stack(b: np.ndarray, p: np.ndarray) -> np.ndarray:
    return np.stack([b, p], axis=-1)


# ---------------------------------------------------------------------------
# regions


@dataclass
class WinRegion:
    """Bodyguard winning region of one arena.

    ``members``, ``core`` and ``level`` have shape ``(placements, n, 2)`` so that
    ``members.ravel()[state_id]`` is membership of that state id.  ``level`` is
    the attractor rank (two-phase, core = 0) or the outer fixpoint iteration in
    which a state entered (exact, core = 1); ``-1`` outside the region.
    """

    arena: Arena
    mode: str
    method: str
    members: np.ndarray
    core: np.ndarray
    level: np.ndarray

    def __contains__(self, state: GameState) -> bool:
        return bool(self.members.ravel()[self.arena.state_id(state)])

    @property
    def bits(self) -> np.ndarray:
        return self.members.ravel()

    def winning_placements(self) -> np.ndarray:
        """Ranks of placements that win against every president start."""
        return np.flatnonzero(self.members[:, :, 0].all(axis=1))


def safe_set(arena: Arena, mode: str = "open") -> np.ndarray:
    sur = arena.surround_matrix(mode)
    return _stack(np.ones_like(sur), sur)


def _core(ops: _Ops, sur: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep_p = sur.copy()
    while True:
        keep_b = ops.pre_bodyguards(keep_p)
        nxt = sur & ops.pre_president(keep_b)
        if np.array_equal(nxt, keep_p):
            return keep_b, keep_p
        keep_p = nxt


def eternal_core(arena: Arena, mode: str = "open", workers: int = 1) -> np.ndarray:
    """Greatest set inside which the bodyguards keep every president-to-move state surrounded."""
    ops = _Ops(arena, workers)
    try:
        return _stack(*_core(ops, arena.surround_matrix(mode)))
    finally:
        ops.close()


def _attract(ops: _Ops, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    in_b, in_p = target[..., 0].copy(), target[..., 1].copy()
    rank_b = np.where(in_b, 0, -1).astype(np.int32)
    rank_p = np.where(in_p, 0, -1).astype(np.int32)
    step = 0
    while True:
        step += 1
        add_b = ops.pre_bodyguards(in_p) & ~in_b
        add_p = ops.pre_president(in_b) & ~in_p
        if not add_b.any() and not add_p.any():
            return _stack(in_b, in_p), _stack(rank_b, rank_p)
        rank_b[add_b] = step
        rank_p[add_p] = step
        in_b |= add_b
        in_p |= add_p


def attractor(arena: Arena, target: np.ndarray, workers: int = 1) -> np.ndarray:
    """States from which the bodyguards force the play into ``target``."""
    ops = _Ops(arena, workers)
    try:
        return _attract(ops, np.asarray(target, dtype=bool))[0]
    finally:
        ops.close()


def two_phase_region(arena: Arena, mode: str = "open", workers: int = 1) -> WinRegion:
    """Attractor of the eternal core: a sound under-approximation of the exact region."""
    ops = _Ops(arena, workers)
    try:
        core = _stack(*_core(ops, arena.surround_matrix(mode)))
        members, level = _attract(ops, core)
    finally:
        ops.close()
    return WinRegion(arena, mode, TWO_PHASE, members, core, level)


def cobuchi_region(arena: Arena, mode: str = "open", workers: int = 1) -> WinRegion:
    """Exact region of the eventually-always-surrounded objective.

    Nested fixpoint ``mu X. nu Y. Pre(X) | (Safe & Pre(Y))``; the inner greatest
    fixpoint restarts from the full state space on every outer round.
    """
    ops = _Ops(arena, workers)
    sur = arena.surround_matrix(mode)
    shape = sur.shape
    win_b = np.zeros(shape, dtype=bool)
    win_p = np.zeros(shape, dtype=bool)
    level_b = np.full(shape, -1, dtype=np.int32)
    level_p = np.full(shape, -1, dtype=np.int32)
    core = None
    rnd = 0
    try:
        while True:
            rnd += 1
            reach_b = ops.pre_bodyguards(win_p)
            reach_p = ops.pre_president(win_b)
            keep_b = np.ones(shape, dtype=bool)
            keep_p = np.ones(shape, dtype=bool)
            while True:
                nxt_b = reach_b | ops.pre_bodyguards(keep_p)
                nxt_p = reach_p | (sur & ops.pre_president(nxt_b))
                if np.array_equal(nxt_b, keep_b) and np.array_equal(nxt_p, keep_p):
                    break
                keep_b, keep_p = nxt_b, nxt_p
            if core is None:
                core = _stack(keep_b, keep_p)
            if np.array_equal(keep_b, win_b) and np.array_equal(keep_p, win_p):
                break
            level_b[keep_b & ~win_b] = rnd
            level_p[keep_p & ~win_p] = rnd
            win_b, win_p = keep_b, keep_p
    finally:
        ops.close()
    return WinRegion(arena, mode, EXACT, _stack(win_b, win_p), core, _stack(level_b, level_p))


def solve_region(arena: Arena, opts: SolveOptions) -> WinRegion:
    if opts.method == EXACT:
        return cobuchi_region(arena, opts.mode, opts.workers)
    return two_phase_region(arena, opts.mode, opts.workers)


# ---------------------------------------------------------------------------
# decisions


@dataclass
class Decision:
    """Outcome of the setup game with ``k`` bodyguards.

    On a win, ``witness`` is the lowest-rank placement that wins against every
    president start.  On a loss, ``responses[r]`` is a president start that
    beats placement rank ``r``; when the max-degree prune fired, the single
    vertex ``escape_vertex`` beats every placement.
    """

    win: bool
    k: int
    mode: str
    method: str
    witness: tuple[int, ...] | None = None
    responses: np.ndarray | None = None
    escape_vertex: int | None = None
    pruned: bool = False
    region: WinRegion | None = None

    def response(self, placement) -> int:
        if self.win:
            raise ValueError("the bodyguards win; there is no escaping start")
        if self.escape_vertex is not None:
            return self.escape_vertex
        return int(self.responses[self.region.arena.rank(placement)])


def decide(g: Graph, k: int, opts: SolveOptions | None = None) -> Decision:
    opts = opts or SolveOptions()
    if g.n == 0:
        return Decision(True, k, opts.mode, opts.method, witness=())
    if k < g.max_degree:
        hub = max(range(g.n), key=lambda v: (g.degree(v), -v))
        return Decision(False, k, opts.mode, opts.method, escape_vertex=hub, pruned=True)
    region = solve_region(Arena(g, k, opts.state_limit), opts)
    good = region.members[:, :, 0]
    rows = good.all(axis=1)
    if rows.any():
        r = int(np.argmax(rows))
        return Decision(True, k, opts.mode, opts.method, witness=region.arena.placement(r), region=region)
    responses = np.argmax(~good, axis=1).astype(np.int32)
    return Decision(False, k, opts.mode, opts.method, responses=responses, region=region)


def bodyguard_number(g: Graph, opts: SolveOptions | None = None) -> int:
    """Least ``k`` for which :func:`decide` reports a bodyguard win."""
    opts = opts or SolveOptions()
    if g.n == 0:
        return 0
    high = g.n - 1 if opts.mode == "open" else g.n
    k = g.max_degree
    while True:
        try:
            if decide(g, k, opts).win:
                return k
        except StateLimitExceeded as exc:
            raise BodyguardBracket(k, high, exc) from exc
        if k >= high:
            raise AssertionError(f"no win found up to k={high}; solver invariant broken")
        k += 1


# ---------------------------------------------------------------------------
# strategies


@dataclass
class Strategy:
    """Memoryless bodyguard strategy over a region.

    ``moves[r, v]`` is the successor placement rank prescribed at the
    bodyguard-to-move state ``(r, v)``, or ``-1`` outside the region.
    """

    region: WinRegion
    moves: np.ndarray

    @property
    def arena(self) -> Arena:
        return self.region.arena

    def move(self, placement, president: int) -> tuple[int, ...]:
        r = self.arena.rank(tuple(sorted(placement)))
        nxt = int(self.moves[r, president])
        if nxt < 0:
            raise KeyError(f"no move prescribed at placement {placement}, president {president}")
        return self.arena.placement(nxt)


def extract_strategy(arena: Arena, region: WinRegion, mode: str | None = None) -> Strategy:
    """Pick a joint move for every bodyguard-to-move state of ``region``.

    Core states move inside the core.  Outside it, two-phase regions move to a
    strictly lower attractor rank and exact regions to a state whose outer
    level does not increase.  Among admissible successors the lowest
    placement rank wins.
    """
    if region.arena is not arena:
        raise ValueError("region belongs to a different arena")
    if mode is not None and mode != region.mode:
        raise ValueError("mode does not match the region")
    own = region.level[:, :, 0]
    if not (own >= 0).any():
        raise ValueError("empty region: no strategy to extract")
    succ_level = region.level[:, :, 1]
    moves_csr = arena.successor_matrix
    moves = np.full(own.shape, -1, dtype=np.int32)
    two_phase = region.method == TWO_PHASE
    for r in np.flatnonzero((own >= 0).any(axis=1)):
        succ = moves_csr.indices[moves_csr.indptr[r] : moves_csr.indptr[r + 1]]
        lv = succ_level[succ]
        mine = own[r]
        if two_phase:
            ok = (lv >= 0) & ((lv < mine) | ((mine == 0) & (lv == 0)))
        else:
            ok = (lv >= 0) & (lv <= mine)
        ok &= mine >= 0
        has = ok.any(axis=0)
        pick = np.argmax(ok, axis=0)
        moves[r] = np.where(has, succ[pick], -1)
        if ((mine >= 0) & ~has).any():
            raise AssertionError(f"region state at placement rank {r} has no admissible move")
    return Strategy(region, moves)


def best_response_president(region: WinRegion, state: GameState) -> int:
    """Escape the region if possible, else delay the bodyguards as long as possible."""
    if state.turn is not Turn.PRESIDENT:
        raise ValueError("president responses are defined at president-to-move states")
    arena = region.arena
    r = arena.rank(state.placement)
    options = arena.graph.closed_neighbors[state.president]
    for v in options:
        if not region.members[r, v, 0]:
            return v
    return max(options, key=lambda v: (region.level[r, v, 0], -v))


# ---------------------------------------------------------------------------
# cop number


def cop_decide(g: Graph, k: int, state_limit: int = DEFAULT_STATE_LIMIT, workers: int = 1) -> bool:
    """Classical capture game: cops place, robber places, cops move first."""
    if g.n == 0:
        return True
    if k == 0:
        return False
    arena = Arena(g, k, state_limit)
    caught = arena.occupancy
    ops = _Ops(arena, workers)
    try:
        region, _ = _attract(ops, _stack(caught, caught))
    finally:
        ops.close()
    return bool(region[:, :, 0].all(axis=1).any())


def cop_number(g: Graph, state_limit: int = DEFAULT_STATE_LIMIT, workers: int = 1) -> int:
    if g.n == 0:
        return 0
    for k in range(1, g.n + 1):
        if cop_decide(g, k, state_limit, workers):
            return k
    raise AssertionError("n cops always win")

