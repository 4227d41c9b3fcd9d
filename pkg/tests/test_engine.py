import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from icb.config import ConfigError, ScenarioConfig
from icb.content_store import ContentStore
from icb.engine import Simulation, avg_hops, cache_hit_ratio, run, traffic_savings
from icb.strategies import STRATEGIES
from icb.topology import Topology, diameter, load_topology
from icb.workload import RequestEvent

KB = 1024


def chain(n_routers):
    """Routers 0..n-1 in a line with the producer on the far end."""
    return Topology.from_edges([(i, i + 1, 1.0) for i in range(n_routers)])


def small_cfg(**kw):
    base = dict(
        n_objects=50, avg_filesize=8 * KB, chunk_size=4 * KB, alpha=0.9,
        cache_bytes=40 * KB, duration=200.0, request_rate=0.5, warmup=0.0, seed=3,
    )
    base.update(kw)
    return ScenarioConfig(**base)


@pytest.mark.parametrize("hits, misses, expected", [(1, 3, 0.25), (0, 7, 0.0), (7, 0, 1.0)])
def test_cache_hit_ratio(hits, misses, expected):
    assert cache_hit_ratio(hits, misses) == expected


def test_cache_hit_ratio_undefined_when_empty():
    assert cache_hit_ratio(0, 0) is None


@pytest.mark.parametrize("hops, expected", [([0, 0, 0], 0.0), ([2, 2], 2.0), ([2, 0], 1.0)])
def test_avg_hops(hops, expected):
    assert avg_hops(hops) == expected


def test_avg_hops_needs_deliveries():
    with pytest.raises(ValueError):
        avg_hops([])


@pytest.mark.parametrize("volume, ratio, saved", [(8600, 0.027, 232.2), (8600, 0.005, 43.0), (8600, 0.0, 0.0), (123.4, 0.0, 0.0)])
def test_traffic_savings(volume, ratio, saved):
    assert traffic_savings(volume, ratio) == saved


def test_traffic_savings_rejects_bad_ratio():
    with pytest.raises(ValueError):
        traffic_savings(10, 1.5)


def test_single_node_topology_is_all_producer():
    topo = load_topology("# nodes=1\n")
    rep = run(small_cfg(topology="x"), topo)
    assert rep.cache_hit_ratio == 0 and rep.avg_hops == 0
    assert rep.cache_hits == 0 and rep.producer_hits == rep.cache_misses > 0


def _walkthrough(strategy="LCE"):
    cfg = small_cfg(n_objects=1, avg_filesize=4 * KB, cache_bytes=4 * KB, producer=3, clients=(0,), strategy=strategy)
    sim = Simulation(cfg, chain(3))
    sim.trace = []
    rep = sim.run([RequestEvent(0.0, 0, 1), RequestEvent(1.0, 0, 1)])
    return sim, rep


def test_chain_walkthrough_lce():
    sim, rep = _walkthrough()
    first, second = sim.trace
    assert first[2:] == (3, 3, 1)  # 3 hops, served by the producer
    assert all(len(sim.nodes[v].cs) == 1 for v in (0, 1, 2))
    assert second[2:] == (0, 0, 0)  # local hit
    assert (rep.cache_hits, rep.cache_misses) == (1, 1)
    assert rep.insertion_count == 3 and rep.replication_count == 0


def test_walkthrough_lcd_moves_one_hop_per_request():
    sim, rep = _walkthrough("LCD")
    assert [t[2] for t in sim.trace] == [3, 2]
    assert rep.replication_count == 2 and rep.insertion_count == 0


def test_same_seed_same_report():
    cfg = small_cfg(strategy="PROBCACHE", policy="RANDOM")
    a, b = run(cfg, chain(4)), run(cfg, chain(4))
    assert repr(a) == repr(b)


def test_aggregation_sends_one_interest_upstream():
    cfg = small_cfg(n_objects=1, avg_filesize=4 * KB, cache_bytes=0, producer=3, clients=(0, 1))
    topo = Topology.from_edges([(0, 2, 1.0), (1, 2, 1.0), (2, 3, 5.0)])
    sim = Simulation(cfg, topo)
    sim.trace = []
    rep = sim.run([RequestEvent(0.0, 0, 1), RequestEvent(0.0, 1, 1)])
    assert sim.nodes[2].aggregated == 1
    # 2 requests, 3 Interest hops (0->2, 1->2, 2->3), 3 Data hops back
    assert rep.events_processed == 8
    assert rep.served_from_producer == 2
    assert sorted(t[2] for t in sim.trace) == [2, 2]
    assert rep.pit_residual == 0


def test_cache_below_one_chunk_rejected():
    with pytest.raises(ConfigError):
        Simulation(small_cfg(cache_bytes=1 * KB), chain(2))


def test_empty_workload():
    rep = run(small_cfg(request_rate=0.0), chain(2))
    assert rep.events_processed == 0 and rep.cache_hit_ratio is None and rep.avg_hops is None


def test_warmup_excludes_early_flows():
    cfg = small_cfg(n_objects=1, avg_filesize=4 * KB, producer=3, clients=(0,), warmup=0.5, duration=10.0)
    rep = Simulation(cfg, chain(3)).run([RequestEvent(1.0, 0, 1), RequestEvent(6.0, 0, 1)])
    assert (rep.cache_hits, rep.cache_misses, rep.requests) == (1, 0, 1)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_zero_capacity_never_hits(strategy):
    rep = run(small_cfg(cache_bytes=0, strategy=strategy), chain(4))
    assert rep.cache_hits == 0 and rep.cache_hit_ratio == 0


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_opportunistic_vs_managed_on_trace(strategy):
    rep = run(small_cfg(strategy=strategy, n_objects=20), chain(4))
    if strategy in ("LCD", "MPC"):
        assert rep.insertion_count == 0 and rep.replication_count > 0
    else:
        assert rep.replication_count == 0 and rep.insertion_count > 0


topologies = st.integers(2, 7).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10).map(
        lambda extra: _connected(n, extra)
    )
)


def _connected(n, extra):
    edges = {(i, i + 1) for i in range(n - 1)}
    for a, b in extra:
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Topology.from_edges([(a, b, 1.0 + (a * 7 + b) % 5) for a, b in sorted(edges)])


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(topologies, st.sampled_from(STRATEGIES), st.sampled_from(["LRU", "FIFO", "LFU", "RANDOM"]), st.integers(0, 10**6))
def test_run_invariants(topo, strategy, policy, seed):
    cfg = small_cfg(strategy=strategy, policy=policy, seed=seed, n_objects=30, cache_bytes=12 * KB)
    sim = Simulation(cfg, topo, check_invariants=True)
    rep = sim.run()
    # conservation and quiescence
    assert rep.issued_interests == rep.served_from_cache + rep.served_from_producer
    assert rep.pit_residual == 0 and rep.unsolicited == 0
    assert 0 <= rep.cache_hit_ratio <= 1
    assert rep.avg_hops <= diameter(topo)


def test_one_router_lce_behaves_like_a_bare_lru_store():
    cfg = small_cfg(n_objects=300, avg_filesize=4 * KB, cache_bytes=20 * 4 * KB, producer=1, clients=(0,))
    sim = Simulation(cfg, chain(1))
    sim.trace = []
    objects = np.random.default_rng(5).integers(1, 301, 5000)
    events = [RequestEvent(float(i), 0, int(o)) for i, o in enumerate(objects)]
    sim.run(events)
    cs = ContentStore(20)
    expected = []
    for ev in events:
        hit = cs.lookup((ev.object, 0))
        if not hit:
            cs.insert((ev.object, 0))
        expected.append(0 if hit else 1)
    assert [t[2] for t in sim.trace] == expected
