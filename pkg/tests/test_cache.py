import random

from bodyguards.cache import ResultCache
from bodyguards.enumeration import connected_labeled_graphs
from bodyguards.solver import SolveOptions, decide
from bodyguards.suites import Solver


def test_put_get(tmp_path):
    cache = ResultCache(tmp_path)
    assert cache.get("abc", 2, "open", "exact") is None
    cache.put("abc", 2, "open", "exact", {"win": True, "witness": [0, 1]})
    assert cache.get("abc", 2, "open", "exact") == {"win": True, "witness": [0, 1]}
    assert cache.get("abc", 2, "closed", "exact") is None
    assert cache.get("abc", 3, "open", "exact") is None
    # write-once: a second put does not replace the entry
    cache.put("abc", 2, "open", "exact", {"win": False, "witness": None})
    assert cache.get("abc", 2, "open", "exact")["win"] is True
    assert not list(tmp_path.rglob("*.tmp"))


def test_version_is_part_of_the_key(tmp_path):
    ResultCache(tmp_path, version="0.0.1").put("abc", 2, "open", "exact", {"win": True, "witness": None})
    assert ResultCache(tmp_path, version="0.0.2").get("abc", 2, "open", "exact") is None


def test_corrupt_entry_is_a_miss(tmp_path):
    cache = ResultCache(tmp_path)
    cache.put("abc", 1, "open", "exact", {"win": True, "witness": None})
    (path,) = tmp_path.rglob("*.json")
    path.write_text("{broken")
    assert cache.get("abc", 1, "open", "exact") is None


def test_cached_verdicts_match_fresh_solves(tmp_path):
    rng = random.Random(20)
    graphs = list(connected_labeled_graphs(5))
    cached = Solver(cache=ResultCache(tmp_path))
    for _ in range(20):
        g = rng.choice(graphs)
        k = rng.randrange(g.max_degree, g.n)
        mode = rng.choice(["open", "closed"])
        method = rng.choice(["exact", "two-phase"])
        first = cached.decide(g, k, mode, method)
        again = cached.decide(g, k, mode, method)
        fresh = decide(g, k, SolveOptions(mode=mode, method=method))
        assert first == again
        assert again["win"] == fresh.win
        assert again["witness"] == (list(fresh.witness) if fresh.witness is not None else None)
