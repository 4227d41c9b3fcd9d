"""Deterministic discrete-event simulation of a CCN network of caches.

Time is kept in seconds; link delays are milliseconds and are converted on
the way in. Events are ordered by ``(time, sequence number)`` so ties are
resolved in scheduling order and a run is a pure function of its config.

Accounting: every chunk Interest issued by a client ends as exactly one of
a cache hit (served from some router's content store) or a miss (served by
the producer). The hit is credited to the serving router, the miss to the
requester's attachment router. Hops are counted from the attachment router
to the serving node; delay is the request's wall time in the simulation.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .ccn_node import CLIENT, Action, ContentName, NodeState, process_data, process_interest, populate_fib
from .config import ConfigError, ScenarioConfig
from .content_store import ContentStore
from .strategies import CachingStrategy, PathContext, make_strategy
from .topology import Topology, betweenness, default_producer, load_builtin, load_topology, shortest_path
from .workload import MZipfDistribution, generate_workload

__all__ = [
    "MetricsReport",
    "NodeMetrics",
    "Simulation",
    "run",
    "resolve_topology",
    "cache_hit_ratio",
    "avg_hops",
    "traffic_savings",
]

_REQUEST, _INTEREST, _DATA = 0, 1, 2
_CACHE, _PRODUCER = 0, 1


def cache_hit_ratio(hits: int, misses: int) -> Optional[float]:
    """hits / (hits + misses); None when nothing was looked up."""
    total = hits + misses
    if total == 0:
        return None
    return hits / total


def avg_hops(hop_counts: Sequence[int]) -> float:
    if len(hop_counts) == 0:
        raise ValueError("no deliveries to average")
    return sum(hop_counts) / len(hop_counts)


def traffic_savings(daily_volume_tb: float, hit_ratio: float) -> float:
    """Terabytes per day kept off upstream links, rounded to 0.1 TB.

    Volumes are decimal terabytes (8.6 PB = 8600 TB).
    """
    if daily_volume_tb < 0:
        raise ValueError("volume must be >= 0")
    if not 0 <= hit_ratio <= 1:
        raise ValueError("hit ratio must be in [0, 1]")
    return round(daily_volume_tb * hit_ratio + 1e-9, 1)


@dataclass
class NodeMetrics:
    cache_hits: int = 0
    cache_misses: int = 0
    producer_hits: int = 0

    @property
    def cache_hit_ratio(self) -> Optional[float]:
        return cache_hit_ratio(self.cache_hits, self.cache_misses)


@dataclass
class MetricsReport:
    scenario: str
    strategy: str
    policy: str
    cache_bytes: int
    scale: float
    seed: int
    config_hash: str
    cache_hits: int = 0
    cache_misses: int = 0
    producer_hits: int = 0
    cache_hit_ratio: Optional[float] = None
    avg_hops: Optional[float] = None
    avg_delay: Optional[float] = None  # milliseconds
    replication_count: int = 0
    insertion_count: int = 0
    events_processed: int = 0
    requests: int = 0
    per_node: Dict[int, NodeMetrics] = field(default_factory=dict)
    # whole-run bookkeeping, warm-up included; served_* count chunk deliveries
    issued_interests: int = 0
    served_from_cache: int = 0
    served_from_producer: int = 0
    pit_residual: int = 0
    unsolicited: int = 0
    pit_expired: int = 0

    def summary(self) -> str:
        def fmt(x, spec):
            return "NA" if x is None else format(x, spec)

        return "\n".join([
            f"scenario      {self.scenario}  strategy {self.strategy}  policy {self.policy}  seed {self.seed}",
            f"cache bytes   {self.cache_bytes}  (scale {self.scale:g})",
            f"requests      {self.requests} objects, {self.cache_hits + self.cache_misses} chunks measured",
            f"cache hit     {fmt(self.cache_hit_ratio, '.4f')}  ({self.cache_hits} hits / {self.cache_misses} misses)",
            f"avg hops      {fmt(self.avg_hops, '.3f')}",
            f"avg delay     {fmt(self.avg_delay, '.3f')} ms",
            f"replications  {self.replication_count}   on-path insertions {self.insertion_count}",
            f"events        {self.events_processed}",
        ])


def resolve_topology(ref: str) -> Topology:
    """A built-in topology name or a path to an edge-list file."""
    if Path(ref).exists():
        return load_topology(Path(ref))
    return load_builtin(ref)


class Simulation:
    """One run's mutable state. Use :func:`run` unless you need to poke at nodes."""

    def __init__(self, cfg: ScenarioConfig, topo: Optional[Topology] = None, check_invariants: bool = False):
        self.cfg = cfg
        self.topo = topo if topo is not None else resolve_topology(cfg.topology)
        self.check_invariants = check_invariants
        topo = self.topo
        if cfg.cache_bytes > 0 and cfg.cache_chunks == 0:
            raise ConfigError(
                f"cache of {cfg.cache_bytes / cfg.scale:.0f} B per node (after scale {cfg.scale:g}) "
                f"is smaller than one {cfg.sim_chunk_size} B chunk"
            )
        self.centrality = betweenness(topo)
        self.producer = cfg.producer if cfg.producer >= 0 else default_producer(topo, self.centrality)
        topo.check_node(self.producer)
        if cfg.clients:
            for c in cfg.clients:
                topo.check_node(c)
            self.clients = list(cfg.clients)
        else:
            self.clients = [v for v in topo.nodes if v != self.producer] or [self.producer]

        seq = np.random.SeedSequence(cfg.seed)
        wl_seed, strat_seed, cs_seed = seq.spawn(3)
        self.wl_rng = np.random.default_rng(wl_seed)
        self.rng = random.Random(int(strat_seed.generate_state(1)[0]))
        cs_seeds = cs_seed.generate_state(topo.n_nodes)

        self.strategy = make_strategy(cfg.strategy, **cfg.strategy_params())
        fib = populate_fib(topo, self.producer)
        max_path_ms = max(topo.path_delay(shortest_path(topo, v, self.producer)) for v in topo.nodes)
        timeout = 4 * 2 * max_path_ms / 1000.0 or float("inf")
        self.nodes: List[NodeState] = []
        for v in topo.nodes:
            cap = 0 if v == self.producer else cfg.cache_chunks
            node = NodeState(
                id=v,
                cs=ContentStore(cap, cfg.policy, random.Random(int(cs_seeds[v]))),
                next_hop=fib[v],
                is_producer=(v == self.producer),
                pit_timeout=timeout,
            )
            self.nodes.append(node)
        cache_nodes = [v for v in topo.nodes if v != self.producer and cfg.cache_chunks > 0]
        self.strategy.bind(topo.adjacency, cache_nodes)
        for node in self.nodes:
            if not node.is_producer:
                self.strategy.init_node(node)
        self._needs_factors = type(self.strategy).interest_factor is not CachingStrategy.interest_factor
        self._uses_path = self.strategy.uses_path
        self._cent = [self.centrality[v] for v in topo.nodes]
        self._sec = {(a, b): topo.delay(a, b) / 1000.0 for a in topo.nodes for b in topo.adjacency[a]}

        self.report = MetricsReport(
            scenario=cfg.name,
            strategy=cfg.strategy,
            policy=cfg.policy,
            cache_bytes=cfg.cache_bytes,
            scale=cfg.scale,
            seed=cfg.seed,
            config_hash=cfg.config_hash(),
            per_node={v: NodeMetrics() for v in topo.nodes},
        )
        self._nchunks = cfg.chunks_per_object
        self._heap: list = []
        self._seq = 0
        # flow id -> [attach node, object, next chunk, measured, chunk issue time]
        self._flows: Dict[int, list] = {}
        self._hops_sum = 0
        self._delay_sum = 0.0
        self._deliveries = 0
        self.trace: Optional[list] = None

    # scheduling -----------------------------------------------------------
    def _push(self, t, kind, *payload):
        self._seq += 1
        heapq.heappush(self._heap, (t, self._seq, kind, payload))

    def schedule_requests(self, events) -> None:
        warm = self.cfg.warmup * self.cfg.duration
        for fid, ev in enumerate(events):
            self._flows[fid] = [ev.client, ev.object, 0, ev.time >= warm, ev.time]
            self._push(ev.time, _REQUEST, fid)

    def generate(self):
        cfg = self.cfg
        if cfg.request_rate == 0:
            return []
        dist = MZipfDistribution(cfg.alpha, cfg.beta, cfg.scaled_objects)
        return generate_workload(dist, self.clients, cfg.request_rate, cfg.duration, self.wl_rng)

    # main loop ------------------------------------------------------------
    def run(self, events=None) -> MetricsReport:
        self.schedule_requests(self.generate() if events is None else events)
        heap = self._heap
        pop = heapq.heappop
        n_events = 0
        while heap:
            t, _, kind, payload = pop(heap)
            n_events += 1
            if kind == _INTEREST:
                self._on_interest(t, *payload)
            elif kind == _DATA:
                self._on_data(t, *payload)
            else:
                self._start_chunk(t, payload[0])
            if self.check_invariants:
                self._assert_invariants()
        return self._finish(n_events)

    def _start_chunk(self, t, fid):
        flow = self._flows[fid]
        flow[4] = t
        self.report.issued_interests += 1
        name = ContentName(flow[1], flow[2])
        self._on_interest(t, flow[0], CLIENT, name, (), (), fid)

    def _on_interest(self, t, v, face, name, trail, factors, fid=None):
        node = self.nodes[v]
        strategy = self.strategy
        decision = process_interest(node, name, face, t, client_tag=fid)
        orders = strategy.on_request_observed(node, name) if not node.is_producer else ()
        trail = trail + (v,)
        action = decision.action
        if action is Action.FORWARD or action is Action.AGGREGATED:
            f = strategy.interest_factor(node, name) if self._needs_factors else None
            factors = factors + (f,)
            entry = node.pit[name]
            if entry.faces.get(face) is None:
                entry.faces[face] = (trail, factors)
            if action is Action.FORWARD:
                nh = decision.next_hop
                self._push(t + self._sec[(v, nh)], _INTEREST, nh, v, name, trail, factors)
        else:
            kind = _CACHE if action is Action.SERVE_FROM_CS else _PRODUCER
            path = (v,)
            hit = strategy.on_cache_hit(node, name, PathContext(trail[::-1], 0, self._cent))
            if hit is not None:
                self._replicate([hit])
            if face == CLIENT:
                self._deliver(t, fid, v, name, path, kind)
            else:
                nf = (None, factors[-1]) if self._needs_factors else None
                self._push(t + self._sec[(v, face)], _DATA, face, name, path + (face,), nf, kind)
        if orders:
            self._replicate(orders)

    def _on_data(self, t, v, name, path, factors, kind):
        node = self.nodes[v]
        entry = node.pit.get(name)
        if entry is None:
            process_data(node, name, self.strategy, None, self.rng, t)
            return
        ctx = None
        if self._uses_path:
            first_trail, first_factors = next(iter(entry.faces.values()))
            gain = factors + first_factors[-2::-1] if self._needs_factors else None
            ctx = PathContext(path + first_trail[-2::-1], len(path) - 1, self._cent, gain)
        _, cached = process_data(node, name, self.strategy, ctx, self.rng, t)
        if cached:
            self.report.insertion_count += 1
        for face, (trail, facs) in entry.faces.items():
            if face == CLIENT:
                for fid in entry.clients:
                    self._deliver(t, fid, v, name, path, kind)
            else:
                nf = factors + (facs[-2],) if self._needs_factors else factors
                self._push(t + self._sec[(v, face)], _DATA, face, name, path + (face,), nf, kind)

    def _replicate(self, orders):
        for target, name in orders:
            node = self.nodes[target]
            if node.is_producer or node.cs.capacity == 0:
                continue
            node.cs.insert(name)
            self.report.replication_count += 1

    def _deliver(self, t, fid, v, name, path, kind):
        flow = self._flows[fid]
        rep = self.report
        if kind == _CACHE:
            rep.served_from_cache += 1
        else:
            rep.served_from_producer += 1
        if flow[3]:
            if kind == _CACHE:
                rep.cache_hits += 1
                rep.per_node[path[0]].cache_hits += 1
            else:
                rep.cache_misses += 1
                rep.producer_hits += 1
                rep.per_node[v].cache_misses += 1
                rep.per_node[path[0]].producer_hits += 1
            self._hops_sum += len(path) - 1
            self._delay_sum += (t - flow[4]) * 1000.0
            self._deliveries += 1
            if self.trace is not None:
                self.trace.append((fid, name, len(path) - 1, path[0], kind))
        flow[2] += 1
        if flow[2] < self._nchunks:
            self._start_chunk(t, fid)
        elif flow[3]:
            rep.requests += 1

    def _assert_invariants(self):
        for node in self.nodes:
            assert len(node.cs) <= node.cs.capacity, f"node {node.id} over capacity"

    def _finish(self, n_events) -> MetricsReport:
        rep = self.report
        rep.events_processed = n_events
        rep.cache_hit_ratio = cache_hit_ratio(rep.cache_hits, rep.cache_misses)
        if self._deliveries:
            rep.avg_hops = self._hops_sum / self._deliveries
            rep.avg_delay = self._delay_sum / self._deliveries
        rep.pit_residual = sum(len(n.pit) for n in self.nodes)
        rep.unsolicited = sum(n.unsolicited for n in self.nodes)
        rep.pit_expired = sum(n.pit_expired for n in self.nodes)
        return rep


def run(cfg: ScenarioConfig, topo: Optional[Topology] = None, check_invariants: bool = False) -> MetricsReport:
    """Simulate one scenario and return its metrics."""
    return Simulation(cfg, topo, check_invariants).run()
