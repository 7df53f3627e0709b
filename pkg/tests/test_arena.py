from itertools import combinations_with_replacement, product
from math import comb, prod

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bodyguards.arena import (
    Arena,
    GameState,
    StateLimitExceeded,
    Turn,
    build_arena,
    joint_move_feasible,
    joint_successors,
    parse_placement_key,
    parse_state_key,
    placement_count,
    president_moves,
    rank_placement,
    surrounded,
    unrank_placement,
)
from bodyguards.graphs import Graph, generate_family, graph_from_spec

P3 = generate_family("path", [3])


def test_rank_examples():
    assert rank_placement((0, 0), 3) == 0
    assert rank_placement((0, 1), 3) == 1
    assert rank_placement((2, 2), 3) == 5
    order = list(combinations_with_replacement(range(3), 2))
    assert [rank_placement(t, 3) for t in order] == list(range(6))


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 7) for k in range(0, 6)])
def test_rank_bijection(n, k):
    m = placement_count(n, k)
    assert m == comb(n + k - 1, k)
    seen = [unrank_placement(r, n, k) for r in range(m)]
    assert seen == sorted(seen) and len(set(seen)) == m
    assert all(rank_placement(t, n) == r for r, t in enumerate(seen))
    if k:
        assert rank_placement((n - 1,) * k, n) == m - 1


def test_rank_errors():
    with pytest.raises(ValueError):
        rank_placement((2, 1), 3)
    with pytest.raises(ValueError):
        rank_placement((0, 3), 3)
    with pytest.raises(ValueError):
        unrank_placement(6, 3, 2)


def test_surround_examples():
    c4 = generate_family("cycle", [4])
    assert surrounded(c4, (1, 3), 0, "open")
    assert not surrounded(c4, (0, 1), 0, "open")
    assert not surrounded(c4, (1, 3), 0, "closed")
    assert surrounded(c4, (0, 1, 3), 0, "closed")
    fig1 = graph_from_spec("tree:0-1;1-2;1-3;0-4;0-5")
    # x = 1 with neighbours 0, 2, 3; y = 0
    assert surrounded(fig1, (0, 2, 3), 1, "open")
    assert not surrounded(fig1, (0, 2, 3), 0, "open")
    assert surrounded(Graph(1, (0,)), (), 0, "open")


def test_president_moves():
    assert set(president_moves(P3, 1)) == {0, 1, 2}
    assert president_moves(Graph(1, (0,)), 0) == (0,)
    q3 = generate_family("hypercube", [3])
    assert all(len(president_moves(q3, v)) == 4 for v in range(8))


def test_joint_successor_examples():
    assert joint_successors(P3, (0, 1)) == [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)]
    assert joint_successors(Graph(1, (0,)), (0,)) == [(0,)]


def test_joint_move_feasible_examples():
    assert joint_move_feasible(P3, (0, 2), (0, 2))
    assert not joint_move_feasible(P3, (0, 0), (2, 2))
    assert joint_move_feasible(P3, (0, 2), (1, 1))


def test_arena_sizes():
    assert build_arena(generate_family("cycle", [5]), 2).state_count == 150
    assert build_arena(generate_family("path", [2]), 1).state_count == 8
    assert build_arena(Graph(1, (0,)), 0).state_count == 2
    with pytest.raises(StateLimitExceeded) as err:
        Arena(generate_family("cycle", [5]), 2, state_limit=100)
    assert err.value.count == 150


def test_state_ids_round_trip():
    arena = Arena(generate_family("cycle", [5]), 2)
    for sid in range(arena.state_count):
        assert arena.state_id(arena.state(sid)) == sid
    s = GameState((1, 3), 0, Turn.PRESIDENT)
    assert arena.state_id(s) == (arena.rank((1, 3)) * 5 + 0) * 2 + 1


def test_state_keys():
    s = GameState((1, 1, 4), 2, Turn.BODYGUARDS)
    assert s.key() == "placement=[1,1,4];president=2;turn=B"
    assert parse_state_key(s.key()) == s
    assert parse_placement_key("[]") == ()
    with pytest.raises(ValueError):
        parse_state_key("placement=[1];president=x;turn=B")


def test_successors_alternate_turns():
    arena = Arena(P3, 2)
    b = GameState((0, 1), 2, Turn.BODYGUARDS)
    assert {s.placement for s in arena.successors(b)} == set(joint_successors(P3, (0, 1)))
    assert all(s.turn is Turn.PRESIDENT and s.president == 2 for s in arena.successors(b))
    p = GameState((0, 1), 1, Turn.PRESIDENT)
    assert sorted(s.president for s in arena.successors(p)) == [0, 1, 2]


@pytest.mark.parametrize("spec", ["path:4", "cycle:5", "star:4", "kpartite:2,3", "complete:4"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_joint_moves_symmetric_and_feasible(spec, k):
    g = graph_from_spec(spec)
    arena = Arena(g, k)
    matrix = arena.successor_matrix
    assert (matrix != matrix.T).nnz == 0
    succ = {r: set(matrix.indices[matrix.indptr[r] : matrix.indptr[r + 1]]) for r in range(arena.placement_total)}
    for r, nxt in succ.items():
        placement = arena.placement(r)
        listed = joint_successors(g, placement)
        assert {arena.rank(p) for p in listed} == nxt
        assert r in nxt
        bound = min(prod(g.degree(t) + 1 for t in placement), arena.placement_total)
        assert len(nxt) <= bound
        for s in range(arena.placement_total):
            assert joint_move_feasible(g, placement, arena.placement(s)) == (s in nxt)


def test_surround_matrix_matches_predicate():
    g = generate_family("wheel", [5])
    arena = Arena(g, 2)
    for mode in ("open", "closed"):
        sur = arena.surround_matrix(mode)
        for r in range(arena.placement_total):
            for v in range(g.n):
                assert sur[r, v] == surrounded(g, arena.placement(r), v, mode)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.data())
def test_closed_implies_open(n, data):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    g = Graph.from_edges(n, edges)
    placement = tuple(sorted(data.draw(st.lists(st.integers(0, n - 1), max_size=4))))
    v = data.draw(st.integers(0, n - 1))
    if surrounded(g, placement, v, "closed"):
        assert surrounded(g, placement, v, "open")


def test_brute_force_successors_small():
    g = generate_family("cycle", [4])
    for placement in combinations_with_replacement(range(4), 2):
        raw = {tuple(sorted(c)) for c in product(*(g.closed_neighbors[t] for t in placement))}
        assert set(joint_successors(g, placement)) == raw


def test_occupancy_rows():
    arena = Arena(P3, 2)
    occ = arena.occupancy
    assert occ.shape == (6, 3)
    assert np.array_equal(occ[arena.rank((0, 2))], [True, False, True])
