import random

import pytest
from hypothesis import given, strategies as st

from icb.ccn_node import ContentName, NodeState
from icb.content_store import ContentStore
from icb.strategies import (
    STRATEGIES,
    CacheLessForMore,
    LeaveCopyDown,
    LeaveCopyEverywhere,
    Magic,
    MostPopularCaching,
    PathContext,
    PopularityTable,
    ProbCache,
    TwoLru,
    make_strategy,
    probcache_probability,
)

X = ContentName(1, 0)
RNG = random.Random(0)


def node(v=0, capacity=4):
    return NodeState(v, ContentStore(capacity))


def test_lce_always_caches():
    s = LeaveCopyEverywhere()
    assert s.decide_on_data(node(), X, PathContext((1, 0), 1), RNG)
    assert s.on_cache_hit(node(), X, PathContext((1, 0), 0)) is None
    assert s.on_request_observed(node(), X) == []


def test_two_lru_second_sighting_caches():
    s, n = TwoLru(), node()
    s.init_node(n)
    assert s.decide_on_data(n, X, None, RNG) is False
    assert s.decide_on_data(n, X, None, RNG) is True


def test_two_lru_name_cache_is_lru_sized_like_cs():
    s, n = TwoLru(), node(capacity=2)
    s.init_node(n)
    for obj in (1, 2, 3):
        s.decide_on_data(n, ContentName(obj), None, RNG)
    # name 1 was pushed out of the 2-entry name cache
    assert s.decide_on_data(n, ContentName(1), None, RNG) is False
    assert s.decide_on_data(n, ContentName(3), None, RNG) is True


def test_probcache_example():
    assert probcache_probability(4, 4, 10) == pytest.approx(0.1)


@given(st.integers(1, 50), st.data(), st.floats(0.01, 100))
def test_probcache_probability_bounded(c, data, t_tw):
    x = data.draw(st.integers(1, c))
    assert 0.0 <= probcache_probability(c, x, t_tw) <= 1.0


@given(st.integers(1, 50), st.floats(0.01, 1.0))
def test_probcache_certain_at_requester_for_small_window(c, t_tw):
    assert probcache_probability(c, c, t_tw) == 1.0


def test_probcache_one_draw_per_decision():
    s = ProbCache(t_tw=10)
    rng, ref = random.Random(4), random.Random(4)
    got = [s.decide_on_data(node(), X, PathContext((0, 1, 2, 3, 4), 4), rng) for _ in range(200)]
    assert got == [ref.random() < 0.1 for _ in range(200)]


def test_clfm_picks_most_central_toward_requester():
    s = CacheLessForMore()
    s.bind([], cache_nodes=[1, 2, 3, 4])
    cent = [0, 5, 9, 9, 1]
    path = (0, 1, 2, 3, 4)
    picks = [x for x in range(1, 5) if s.decide_on_data(node(path[x]), X, PathContext(path, x, cent), RNG)]
    assert picks == [3]


def test_clfm_ignores_source_even_if_central():
    s = CacheLessForMore()
    s.bind([], cache_nodes=[0, 1, 2])
    cent = [100, 2, 1]
    assert s.decide_on_data(node(1), X, PathContext((0, 1, 2), 1, cent), RNG)


def test_magic_single_copy_at_max_gain():
    s = Magic()
    path = (9, 1, 2, 3)
    factors = (None, 4, 3, -1)  # gains 4, 6, -3
    picks = [x for x in range(1, 4) if s.decide_on_data(node(path[x]), X, PathContext(path, x, None, factors), RNG)]
    assert picks == [2]


def test_magic_needs_positive_gain():
    s = Magic()
    path = (9, 1, 2)
    factors = (None, 0, -2)
    assert not any(s.decide_on_data(node(), X, PathContext(path, x, None, factors), RNG) for x in (1, 2))


def test_magic_factor_subtracts_victim_popularity():
    s, n = Magic(), node(capacity=1)
    s.init_node(n)
    a, b = ContentName(1), ContentName(2)
    for _ in range(3):
        s.on_request_observed(n, a)
    n.cs.insert(a)
    s.on_request_observed(n, b)
    assert s.interest_factor(n, b) == 1 - 3
    assert s.interest_factor(n, a) == 3 - 3


def test_lcd_replicates_one_hop_down():
    # chain producer(3)-B(2)-A(1)-client router(0); hit at B
    s = LeaveCopyDown()
    assert s.on_cache_hit(node(2), X, PathContext((2, 1, 0), 0)) == (1, X)
    assert s.on_cache_hit(node(0), X, PathContext((0,), 0)) is None
    assert s.decide_on_data(node(), X, PathContext((2, 1), 1), RNG) is False


def test_mpc_threshold_trace():
    s, n = MostPopularCaching(threshold=3), node(0)
    s.bind([(1, 2), (0,), (0,)], cache_nodes=[0, 1, 2])
    s.init_node(n)
    assert s.on_request_observed(n, X) == []
    assert s.on_request_observed(n, X) == []
    assert s.on_request_observed(n, X) == [(0, X), (1, X), (2, X)]
    assert s.on_request_observed(n, X) == []
    assert s.decide_on_data(n, X, None, RNG) is False


def test_mpc_skips_non_caching_neighbours():
    s, n = MostPopularCaching(threshold=1), node(0)
    s.bind([(1, 2)], cache_nodes=[0, 1])
    s.init_node(n)
    assert s.on_request_observed(n, X) == [(0, X), (1, X)]


def test_popularity_table_bounded():
    t = PopularityTable(2)
    t.observe("a")
    t.observe("a")
    t.observe("b")
    t.observe("c")
    assert len(t) == 2 and t["a"] == 0 and t["c"] == 1


@pytest.mark.parametrize("kind", STRATEGIES)
def test_strategy_class_flags(kind):
    s = make_strategy(kind)
    assert s.kind == kind
    assert s.managed == (kind in ("LCD", "MPC"))
    assert s.opportunistic == (kind not in ("LCD", "MPC"))


def test_make_strategy_aliases_and_errors():
    assert make_strategy("2-LRU").kind == "TWO_LRU"
    with pytest.raises(ValueError):
        make_strategy("SACS")
