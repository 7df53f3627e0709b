"""Scripted strategies for both sides, exact policy verification and playouts.

Bodyguard policies act on *labeled* token tuples (token ``i`` keeps its role
for the whole game), which is what the scripted constructions need; the game
state they report is the sorted multiset.  President policies see only the
multiset, so they can be checked against every joint bodyguard move.

Verification fixes one side's policy and explores the reachable one-player
graph.  A bodyguard policy wins iff no reachable cycle visits an unsurrounded
president-to-move state; a president policy wins iff every reachable cycle
does.  Both are decided from strongly connected components.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .arena import DEFAULT_STATE_LIMIT, Arena, GameState, StateLimitExceeded, Turn, surrounded
from .graphs import Graph, GraphError, generate_family, leaf_set, product

__all__ = [
    "PolicyError",
    "BodyguardPolicy",
    "PresidentPolicy",
    "Verdict",
    "Playout",
    "policy_universal",
    "policy_multipartite",
    "policy_tree_bodyguards",
    "policy_cycle_bodyguards",
    "policy_strong_grid",
    "evader_cycle",
    "evader_tree",
    "evader_hypercube",
    "president_stay",
    "president_greedy_escape",
    "president_best_response",
    "verify_policy",
    "playout",
]


class PolicyError(ValueError):
    """A policy is inapplicable to the board or produced an illegal move."""


@dataclass
class BodyguardPolicy:
    id: str
    graph: Graph
    start: tuple[int, ...]
    step: Callable[[tuple[int, ...], int], tuple[int, ...]]
    role: str = field(default="bodyguards", init=False)

    @property
    def k(self) -> int:
        return len(self.start)


@dataclass
class PresidentPolicy:
    id: str
    graph: Graph
    k: int | None
    place: Callable[[tuple[int, ...]], int]
    step: Callable[[tuple[int, ...], int], int]
    role: str = field(default="president", init=False)


def _check_tokens(g: Graph, before: Sequence[int], after: Sequence[int], who: str) -> None:
    if len(after) != len(before):
        raise PolicyError(f"{who} changed the number of tokens")
    for x, y in zip(before, after):
        if not (0 <= y < g.n and (x == y or g.has_edge(x, y))):
            raise PolicyError(f"{who} moved a token from {x} to {y}, which is not in N[{x}]")


def _check_president(g: Graph, before: int, after: int, who: str) -> None:
    if not (0 <= after < g.n and (after == before or g.has_edge(before, after))):
        raise PolicyError(f"{who} moved the president from {before} to {after}")


def _next_hop(g: Graph) -> list[list[int]]:
    """``hop[a][b]``: lowest-id neighbour of ``a`` on a shortest ``a``-``b`` path (``a`` if equal or unreachable)."""
    dist = g.distance_matrix
    hop = [[a] * g.n for a in range(g.n)]
    for a in range(g.n):
        for b in range(g.n):
            if a != b and dist[a][b] > 0:
                hop[a][b] = next(u for u in g.neighbors[a] if dist[u][b] == dist[a][b] - 1)
    return hop


# ---------------------------------------------------------------------------
# bodyguard policies


def policy_universal(g: Graph, k: int | None = None) -> BodyguardPolicy:
    """``n - 1`` tokens leave a single hole and keep the hole under the president."""
    if g.n < 1:
        raise PolicyError("universal policy needs a nonempty graph")
    if k is not None and k != g.n - 1:
        raise PolicyError(f"universal policy uses exactly n - 1 = {g.n - 1} bodyguards, not {k}")
    hop = _next_hop(g)

    def step(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
        holes = set(range(g.n)) - set(tokens)
        if len(holes) != 1:
            return tokens
        (hole,) = holes
        if hole == president or g.distance_matrix[president][hole] < 0:
            return tokens
        # every token on the president->hole path shifts one step toward the hole
        shift = {}
        v = president
        while v != hole:
            shift[v] = hop[v][hole]
            v = shift[v]
        return tuple(shift.get(t, t) for t in tokens)

    return BodyguardPolicy("universal", g, tuple(range(g.n - 1)), step)


def policy_multipartite(parts: Sequence[int], k: int | None = None, graph: Graph | None = None) -> BodyguardPolicy:
    """Cover every part except the president's own."""
    parts = list(parts)
    if len(parts) < 2 or any(p < 1 for p in parts):
        raise PolicyError("need at least two nonempty parts")
    if parts != sorted(parts):
        raise PolicyError("parts must be sorted in ascending order")
    g = generate_family("kpartite", parts)
    if graph is not None and graph != g:
        raise PolicyError("graph is not the complete multipartite graph with these parts")
    need = g.n - parts[0]
    if k is not None and k != need:
        raise PolicyError(f"multipartite policy uses {need} bodyguards, not {k}")
    block = []
    for i, size in enumerate(parts):
        block.extend([i] * size)

    def step(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
        home = block[president]
        wanted = [w for w in range(g.n) if block[w] != home]
        out = list(tokens)
        free = list(range(len(tokens)))
        # tokens already on a wanted vertex keep it
        open_targets = []
        taken = set()
        for w in wanted:
            i = next((i for i in free if tokens[i] == w and i not in taken), None)
            if i is None:
                open_targets.append(w)
            else:
                taken.add(i)
        spare = [i for i in free if i not in taken]
        for w in open_targets:
            i = next((i for i in spare if block[tokens[i]] != block[w]), None)
            if i is None:
                break
            spare.remove(i)
            out[i] = w
        return tuple(out)

    return BodyguardPolicy("multipartite", g, tuple(range(parts[0], g.n)), step)


def _require_tree(g: Graph) -> None:
    if g.n < 3 or len(g.edges) != g.n - 1 or not g.is_connected():
        raise PolicyError("graph must be a tree on at least three vertices")


def policy_tree_bodyguards(g: Graph, k: int | None = None) -> BodyguardPolicy:
    """Token ``i`` starts on leaf ``i`` and escorts the president's neighbour facing that leaf."""
    _require_tree(g)
    leaves = sorted(leaf_set(g))
    if k is not None and k != len(leaves):
        raise PolicyError(f"tree policy uses one bodyguard per leaf ({len(leaves)}), not {k}")
    hop = _next_hop(g)

    def step(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
        out = []
        for leaf, x in zip(leaves, tokens):
            # the neighbour of the president on the geodesic to this leaf
            target = hop[president][leaf] if president != leaf else g.neighbors[president][0]
            out.append(x if x == target else hop[x][target])
        return tuple(out)

    return BodyguardPolicy("tree", g, tuple(leaves), step)


def _cw(n: int, a: int, b: int) -> int:
    """Clockwise (increasing index) distance from ``a`` to ``b``."""
    return (b - a) % n


def _cyc(n: int, a: int, b: int) -> int:
    return min(_cw(n, a, b), _cw(n, b, a))


def _toward(n: int, x: int, t: int) -> int:
    """One step along a shortest arc to ``t`` (clockwise on ties)."""
    if x == t:
        return x
    return (x + 1) % n if _cw(n, x, t) <= _cw(n, t, x) else (x - 1) % n


def _pincer(n: int, a: int, b: int, t: int) -> tuple[int, int]:
    """Two chasers close the arc between them that contains ``t``."""
    inside = 0 < _cw(n, a, t) < _cw(n, a, b) or (a == t)
    if inside:
        na = a if a == t else (a + 1) % n
        nb = b if b == t else (b - 1) % n
    else:
        na = a if a == t else (a - 1) % n
        nb = b if b == t else (b + 1) % n
    return na, nb


def policy_cycle_bodyguards(n: int, k: int | None = None) -> BodyguardPolicy:
    """Cycle strategy: a two-token response table for ``n <= 5``, a pincer scheme otherwise.

    For ``n > 5`` tokens 0 and 1 pincer the president's clockwise neighbour;
    whichever of them gets within one step of it becomes its holder and
    mirrors the president, while the other joins token 2 to pincer the
    counter-clockwise neighbour.
    """
    if n < 3:
        raise PolicyError("cycle order must be >= 3")
    g = generate_family("cycle", [n])
    if n <= 5:
        k = 2 if k is None else k
        if k != 2:
            raise PolicyError("the small-cycle table uses exactly 2 bodyguards")

        def small(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
            lo, hi = (president - 1) % n, (president + 1) % n
            a, b = tokens
            for ta, tb in ((lo, hi), (hi, lo)):
                if _cyc(n, a, ta) <= 1 and _cyc(n, b, tb) <= 1:
                    return (ta, tb)
            return (_toward(n, a, lo), _toward(n, b, hi))

        return BodyguardPolicy("cycle", g, (0, 2), small)

    k = 3 if k is None else k
    if k not in (2, 3):
        raise PolicyError("the large-cycle scheme is defined for 2 or 3 bodyguards")

    def large(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
        plus, minus = (president + 1) % n, (president - 1) % n
        out = list(tokens)
        holder = next((i for i in (0, 1) if _cyc(n, tokens[i], plus) <= 1), None)
        if holder is None:
            out[0], out[1] = _pincer(n, tokens[0], tokens[1], plus)
            if k == 3:
                out[2] = _toward(n, tokens[2], minus)
            return tuple(out)
        out[holder] = plus
        other = 1 - holder
        if k == 3:
            out[other], out[2] = _pincer(n, tokens[other], tokens[2], minus)
        else:
            out[other] = _toward(n, tokens[other], minus)
        return tuple(out)

    start = tuple(int(round(i * n / k)) % n for i in range(k))
    return BodyguardPolicy("cycle", g, start, large)


def strong_grid(dims: Sequence[int]) -> Graph:
    g = generate_family("path", [dims[0]])
    for d in dims[1:]:
        g = product(g, generate_family("path", [d]), "strong")
    return g


def policy_strong_grid(dims: Sequence[int], k: int | None = None, graph: Graph | None = None) -> BodyguardPolicy:
    """One escort per nonzero offset ``a`` in ``{-1,0,1}^d``, chasing ``clamp(president + a)``.

    ``k`` defaults to ``3^d - 1``; larger ``k`` is accepted and the extra
    tokens follow the president onto its own vertex.
    """
    dims = list(dims)
    if not dims or any(d < 3 for d in dims):
        raise PolicyError("strong-grid policy needs every path order >= 3")
    g = strong_grid(dims)
    if graph is not None and graph != g:
        raise PolicyError("graph is not the strong grid with these dimensions")
    offsets = [a for a in cartesian((-1, 0, 1), repeat=len(dims)) if any(a)]
    need = len(offsets)
    if k is not None and k < need:
        raise PolicyError(f"strong-grid policy needs 3^d - 1 = {need} bodyguards, not {k}")
    # surplus tokens shadow the president itself
    offsets += [(0,) * len(dims)] * ((k or need) - need)
    strides = [int(np.prod(dims[i + 1 :])) for i in range(len(dims))]

    def coords(v: int) -> list[int]:
        return [(v // s) % d for s, d in zip(strides, dims)]

    def vertex(c: Sequence[int]) -> int:
        return sum(x * s for x, s in zip(c, strides))

    def escort(p: list[int], a: Sequence[int]) -> list[int]:
        return [min(max(x + da, 0), d - 1) for x, da, d in zip(p, a, dims)]

    def step(tokens: tuple[int, ...], president: int) -> tuple[int, ...]:
        p = coords(president)
        out = []
        for x, a in zip(tokens, offsets):
            c, t = coords(x), escort(p, a)
            out.append(vertex([ci + (ti > ci) - (ti < ci) for ci, ti in zip(c, t)]))
        return tuple(out)

    centre = [d // 2 for d in dims]
    start = tuple(vertex(escort(centre, a)) for a in offsets)
    return BodyguardPolicy("strong-grid", g, start, step)


# ---------------------------------------------------------------------------
# president policies


def evader_cycle(n: int, k: int = 2) -> PresidentPolicy:
    """Stay at cycle distance >= 3 from one bodyguard, the farthest one.

    The escape direction is read off positions: step away from the farthest
    token (ties: lowest vertex id), i.e. rotate the way it is moving.
    """
    if n <= 5:
        raise PolicyError("the cycle evader needs n >= 6")
    if k != 2:
        raise PolicyError("the cycle evader plays against exactly 2 bodyguards")
    g = generate_family("cycle", [n])

    def place(placement: tuple[int, ...]) -> int:
        first = placement[0]
        return next(v for v in range(n) if _cyc(n, v, first) >= 3)

    def step(placement: tuple[int, ...], president: int) -> int:
        far = max(placement, key=lambda t: (_cyc(n, t, president), -t))
        if _cyc(n, far, president) >= 3:
            return president
        on_cw_side = _cw(n, president, far) <= _cw(n, far, president)
        return (president - 1) % n if on_cw_side else (president + 1) % n

    return PresidentPolicy("evader-cycle", g, k, place, step)


def evader_tree(g: Graph, k: int | None = None) -> PresidentPolicy:
    """Hide in branches holding more leaves than bodyguards; retreat to the centre after a failed surround."""
    _require_tree(g)
    leaves = leaf_set(g)
    if len(leaves) < 2:
        raise PolicyError("tree must have at least two leaves")
    if k is None:
        k = len(leaves) - 1
    if k != len(leaves) - 1:
        raise PolicyError(f"the tree evader plays against l - 1 = {len(leaves) - 1} bodyguards, not {k}")
    dist = g.distance_matrix
    centre = min(range(g.n), key=lambda v: (max(dist[v]), v))
    hop = _next_hop(g)
    # side[p][u]: bit-set of the component of T - p containing neighbour u
    side = [[0] * g.n for _ in range(g.n)]
    for p in range(g.n):
        for u in g.neighbors[p]:
            side[p][u] = sum(1 << w for w in range(g.n) if w != p and dist[w][u] < dist[w][p])
    leaf_mask = sum(1 << v for v in leaves)

    def place(placement: tuple[int, ...]) -> int:
        return centre

    def step(placement: tuple[int, ...], president: int) -> int:
        occupied = 0
        for t in placement:
            occupied |= 1 << t
        if g.adj[president] & ~occupied:
            return hop[president][centre]
        best = None
        for u in g.neighbors[president]:
            comp = side[president][u]
            surplus = (comp & leaf_mask).bit_count() - sum(1 for t in placement if comp >> t & 1)
            downhill = president == centre or not comp >> centre & 1
            key = (surplus > 0 and downhill, surplus > 0, surplus, -u)
            if best is None or key > best[0]:
                best = (key, u)
        return best[1]

    return PresidentPolicy("evader-tree", g, k, place, step)


def evader_hypercube(d: int, k: int | None = None) -> PresidentPolicy:
    """Keep some bodyguard at Hamming distance >= 3 after every president move."""
    if d < 3:
        raise PolicyError("the hypercube evader needs dimension >= 3")
    k = d if k is None else k
    if k != d:
        raise PolicyError(f"the hypercube evader plays against exactly d = {d} bodyguards")
    g = generate_family("hypercube", [d])
    full = (1 << d) - 1

    def place(placement: tuple[int, ...]) -> int:
        # odd distance >= 3 from the first token
        return placement[0] ^ (full if d % 2 else full >> 1)

    def step(placement: tuple[int, ...], president: int) -> int:
        for t in placement:
            diff = t ^ president
            if diff.bit_count() == 2:
                free = full & ~diff
                return president ^ (free & -free)
        return president

    return PresidentPolicy("evader-hypercube", g, k, place, step)


def president_stay(g: Graph, start: int = 0) -> PresidentPolicy:
    return PresidentPolicy("stay", g, None, lambda placement: start, lambda placement, p: p)


def president_greedy_escape(g: Graph) -> PresidentPolicy:
    """Go where the most neighbours are currently unguarded (ties: stay, then lowest id)."""

    def exposure(placement: tuple[int, ...], v: int) -> int:
        occupied = 0
        for t in placement:
            occupied |= 1 << t
        return (g.adj[v] & ~occupied).bit_count()

    def place(placement: tuple[int, ...]) -> int:
        return max(range(g.n), key=lambda v: (exposure(placement, v), -v))

    def step(placement: tuple[int, ...], president: int) -> int:
        return max(g.closed_neighbors[president], key=lambda v: (exposure(placement, v), v == president, -v))

    return PresidentPolicy("greedy-escape", g, None, place, step)


def president_best_response(region) -> PresidentPolicy:
    """Adversary driven by a solved region (see :func:`solver.best_response_president`)."""
    from .solver import best_response_president

    arena = region.arena

    def place(placement: tuple[int, ...]) -> int:
        r = arena.rank(placement)
        outside = np.flatnonzero(~region.members[r, :, 0])
        if len(outside):
            return int(outside[0])
        return int(np.argmax(region.level[r, :, 0]))

    def step(placement: tuple[int, ...], president: int) -> int:
        return best_response_president(region, GameState(placement, president, Turn.PRESIDENT))

    return PresidentPolicy("best-response", arena.graph, arena.k, place, step)


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verdict:
    """``ok`` is the policy's success; ``witness`` is a refuting cycle of game states."""

    ok: bool
    role: str
    states: int
    witness: list[GameState] | None = None


def _cycle_through(start: int, succ: Callable[[int], Sequence[int]], members: set[int] | np.ndarray) -> list[int]:
    """Shortest path ``start -> ... -> start`` inside one strongly connected component."""
    parent = {}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in succ(v):
            if u == start:
                path = [v]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                return path[::-1]
            if members[u] and u not in parent:
                parent[u] = v
                queue.append(u)
    raise AssertionError("node is not on a cycle")


def _on_cycle(n_nodes: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per node: lies on a directed cycle; plus the component labels."""
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n_nodes, n_nodes)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=labels.max(initial=0) + 1)
    cyclic = sizes[labels] > 1
    cyclic[src[src == dst]] = True
    return cyclic, labels


def _verify_bodyguards(g: Graph, policy: BodyguardPolicy, mode: str, state_limit: int) -> Verdict:
    # nodes are president-to-move states (labeled tokens, president)
    index: dict[tuple[tuple[int, ...], int], int] = {}
    nodes: list[tuple[tuple[int, ...], int]] = []
    src: list[int] = []
    dst: list[int] = []
    cache: dict[tuple[tuple[int, ...], int], tuple[int, ...]] = {}

    def respond(tokens: tuple[int, ...], president: int) -> int:
        key = (tokens, president)
        after = cache.get(key)
        if after is None:
            after = tuple(policy.step(tokens, president))
            _check_tokens(g, tokens, after, f"policy {policy.id}")
            cache[key] = after
        node = (after, president)
        i = index.get(node)
        if i is None:
            if len(nodes) >= state_limit:
                raise StateLimitExceeded(len(nodes) + 1, state_limit, "policy graph")
            i = index[node] = len(nodes)
            nodes.append(node)
        return i

    for v in range(g.n):
        respond(policy.start, v)
    i = 0
    while i < len(nodes):
        tokens, p = nodes[i]
        for v in g.closed_neighbors[p]:
            src.append(i)
            dst.append(respond(tokens, v))
        i += 1
    unsafe = np.array([not surrounded(g, t, p, mode) for t, p in nodes], dtype=bool)
    src_a, dst_a = np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)
    cyclic, labels = _on_cycle(len(nodes), src_a, dst_a)
    bad = np.flatnonzero(unsafe & cyclic)
    if not len(bad):
        return Verdict(True, "bodyguards", len(nodes))
    first = int(bad[0])
    order = np.argsort(src_a, kind="stable")
    starts = np.searchsorted(src_a[order], np.arange(len(nodes) + 1))
    succ = lambda v: dst_a[order[starts[v] : starts[v + 1]]].tolist()  # noqa: E731
    members = labels == labels[first]
    loop = _cycle_through(first, succ, members)
    witness = []
    for a, b in zip(loop, loop[1:] + loop[:1]):
        tokens, p = nodes[a]
        witness.append(GameState(tuple(sorted(tokens)), p, Turn.PRESIDENT))
        witness.append(GameState(tuple(sorted(tokens)), nodes[b][1], Turn.BODYGUARDS))
    return Verdict(False, "bodyguards", len(nodes), witness)


def _verify_president(g: Graph, k: int, policy: PresidentPolicy, mode: str, state_limit: int) -> Verdict:
    # nodes are bodyguard-to-move states (placement rank, president); the
    # bodyguards range over every joint move
    arena = Arena(g, k, state_limit)
    m, n = arena.placement_total, g.n
    sur = arena.surround_matrix(mode)
    moves = arena.successor_matrix
    reply = np.empty((m, n), dtype=np.int64)
    for r in range(m):
        placement = arena.placement(r)
        for v in range(n):
            u = policy.step(placement, v)
            _check_president(g, v, u, f"policy {policy.id}")
            reply[r, v] = u
    reach = np.zeros((m, n), dtype=bool)
    for r in range(m):
        reach[r, policy.place(arena.placement(r))] = True
    frontier = reach.copy()
    while frontier.any():
        landed = (moves @ frontier.astype(np.float32)) > 0  # joint-move matrix is symmetric
        r_idx, v_idx = np.nonzero(landed)
        nxt = np.zeros_like(reach)
        nxt[r_idx, reply[r_idx, v_idx]] = True
        frontier = nxt & ~reach
        reach |= frontier
    # keep only surrounded transitions: the evader loses iff they contain a cycle
    src, dst = [], []
    coo = moves.tocoo()
    for v in range(n):
        keep = reach[coo.row, v] & sur[coo.col, v]
        r_from, r_to = coo.row[keep], coo.col[keep]
        src.append(r_from * n + v)
        dst.append(r_to * n + reply[r_to, v])
    src_a, dst_a = np.concatenate(src), np.concatenate(dst)
    cyclic, labels = _on_cycle(m * n, src_a, dst_a)
    bad = np.flatnonzero(cyclic & reach.ravel())
    states = int(reach.sum())
    if not len(bad):
        return Verdict(True, "president", states)
    first = int(bad[0])
    order = np.argsort(src_a, kind="stable")
    starts = np.searchsorted(src_a[order], np.arange(m * n + 1))
    succ = lambda x: dst_a[order[starts[x] : starts[x + 1]]].tolist()  # noqa: E731
    loop = _cycle_through(first, succ, labels == labels[first])
    witness = []
    for a, b in zip(loop, loop[1:] + loop[:1]):
        r, v = divmod(a, n)
        witness.append(GameState(arena.placement(r), v, Turn.BODYGUARDS))
        witness.append(GameState(arena.placement(b // n), v, Turn.PRESIDENT))
    return Verdict(False, "president", states, witness)


def verify_policy(
    g: Graph,
    k: int,
    policy: BodyguardPolicy | PresidentPolicy,
    mode: str = "open",
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> Verdict:
    """Model-check ``policy`` against every behaviour of the other side."""
    if policy.graph != g:
        raise PolicyError(f"policy {policy.id} was built for a different graph")
    if isinstance(policy, BodyguardPolicy):
        if policy.k != k:
            raise PolicyError(f"policy {policy.id} controls {policy.k} bodyguards, not {k}")
        return _verify_bodyguards(g, policy, mode, state_limit)
    if policy.k is not None and policy.k != k:
        raise PolicyError(f"policy {policy.id} is designed against {policy.k} bodyguards, not {k}")
    return _verify_president(g, k, policy, mode, state_limit)


# ---------------------------------------------------------------------------
# playouts


@dataclass
class Playout:
    """Alternating simulation, starting with the bodyguards' first move.

    ``states[i]`` alternates president-to-move / bodyguard-to-move;
    ``surrounded[j]`` belongs to the j-th bodyguard turn.  On a lasso,
    ``loop_start`` is the index in ``states`` where the repeated state first
    occurred.
    """

    states: list[GameState]
    surrounded: list[bool]
    reason: str
    loop_start: int | None = None

    def tail_surrounded(self) -> list[bool]:
        """Surround flags of the bodyguard turns inside the repeating loop."""
        if self.loop_start is None:
            return []
        return self.surrounded[self.loop_start // 2 :]

    def transcript(self) -> str:
        return "".join(json.dumps({"state": s.key()}) + "\n" for s in self.states)


def playout(
    g: Graph,
    k: int,
    bodyguards: BodyguardPolicy,
    president: PresidentPolicy,
    max_steps: int = 1000,
    mode: str = "open",
) -> Playout:
    if bodyguards.k != k or (president.k is not None and president.k != k):
        raise PolicyError("policies disagree with k")
    tokens = bodyguards.start
    where = president.place(tuple(sorted(tokens)))
    if not 0 <= where < g.n:
        raise PolicyError(f"policy {president.id} placed the president off the board")
    states: list[GameState] = [GameState(tuple(sorted(tokens)), where, Turn.BODYGUARDS)]
    flags: list[bool] = []
    seen = {(tokens, where, Turn.BODYGUARDS): 0}
    for step in range(max_steps):
        after = tuple(bodyguards.step(tokens, where))
        try:
            _check_tokens(g, tokens, after, f"policy {bodyguards.id}")
        except PolicyError as exc:
            raise PolicyError(f"step {step}: {exc}") from None
        tokens = after
        placement = tuple(sorted(tokens))
        flags.append(surrounded(g, placement, where, mode))
        key = (tokens, where, Turn.PRESIDENT)
        if key in seen:
            return Playout(states, flags, "lasso", seen[key])
        seen[key] = len(states)
        states.append(GameState(placement, where, Turn.PRESIDENT))
        nxt = president.step(placement, where)
        try:
            _check_president(g, where, nxt, f"policy {president.id}")
        except PolicyError as exc:
            raise PolicyError(f"step {step}: {exc}") from None
        where = nxt
        key = (tokens, where, Turn.BODYGUARDS)
        if key in seen:
            return Playout(states, flags, "lasso", seen[key])
        seen[key] = len(states)
        states.append(GameState(placement, where, Turn.BODYGUARDS))
    return Playout(states, flags, "budget")
