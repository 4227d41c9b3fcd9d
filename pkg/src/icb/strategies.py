"""The seven caching strategies behind one decision interface.

Every strategy answers three questions for the engine:

* ``decide_on_data`` - should this router keep the Data passing through it?
  (opportunistic, on-path caching)
* ``on_cache_hit`` - after a hit at a router, should a copy be pushed
  somewhere? (managed replica, LCD)
* ``on_request_observed`` - after an Interest is processed, should copies be
  pushed to neighbours? (managed replica, MPC)

LCE, 2-LRU, CLFM, ProbCache and MAGIC only use the first hook; LCD and MPC
only use the other two.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple

from .content_store import ContentStore

__all__ = [
    "STRATEGIES",
    "PathContext",
    "PopularityTable",
    "CachingStrategy",
    "LeaveCopyEverywhere",
    "TwoLru",
    "CacheLessForMore",
    "ProbCache",
    "Magic",
    "LeaveCopyDown",
    "MostPopularCaching",
    "make_strategy",
    "probcache_probability",
]

STRATEGIES = ("LCE", "TWO_LRU", "CLFM", "PROBCACHE", "MAGIC", "LCD", "MPC")

ReplicationOrder = Tuple[int, Hashable]


@dataclass
class PathContext:
    """Where a Data message is on its way back to the requester.

    ``delivery_path[0]`` is the node that served the content and
    ``delivery_path[-1]`` the requester's attachment router; the current
    router sits at index ``x``. ``gain_factors`` is aligned with the path and
    holds MAGIC's ``f_new - f_victim`` as recorded by the Interest (None for
    the serving node or when MAGIC is not in use).
    """

    delivery_path: Sequence[int]
    x: int
    centrality: Optional[Sequence[float]] = None
    gain_factors: Optional[Sequence[Optional[float]]] = None

    @property
    def c(self) -> int:
        return len(self.delivery_path) - 1

    @property
    def node(self) -> int:
        return self.delivery_path[self.x]


class PopularityTable:
    """Per-router request counters, bounded with LRU eviction of names."""

    def __init__(self, capacity: int):
        self.capacity = max(1, int(capacity))
        self._counts: "OrderedDict[Hashable, int]" = OrderedDict()

    def __len__(self) -> int:
        return len(self._counts)

    def __getitem__(self, name: Hashable) -> int:
        return self._counts.get(name, 0)

    def observe(self, name: Hashable) -> int:
        counts = self._counts
        n = counts.get(name, 0) + 1
        counts[name] = n
        counts.move_to_end(name)
        if len(counts) > self.capacity:
            counts.popitem(last=False)
        return n


def probcache_probability(c: int, x: int, t_tw: float) -> float:
    """ProbCache caching probability for the router ``x`` hops from the source.

    ``((c - x + 1) / t_tw) * (x / c)`` clamped to [0, 1]: the first factor
    weighs remaining path capacity against the target time window, the
    second favours routers close to the requester.
    """
    if c <= 0:
        return 0.0
    p = ((c - x + 1) / t_tw) * (x / c)
    return min(1.0, max(0.0, p))


class CachingStrategy:
    kind = ""
    opportunistic = True
    managed = False
    # whether decide_on_data reads the PathContext
    uses_path = False

    def __init__(self) -> None:
        self.neighbors: Sequence[Sequence[int]] = ()
        self.cache_nodes: frozenset = frozenset()

    def bind(self, neighbors: Sequence[Sequence[int]], cache_nodes) -> None:
        """Give the strategy the router adjacency and the set of caching routers."""
        self.neighbors = neighbors
        self.cache_nodes = frozenset(cache_nodes)

    def init_node(self, node) -> None:
        pass

    def decide_on_data(self, node, name, ctx: PathContext, rng) -> bool:
        return False

    def on_cache_hit(self, node, name, ctx: PathContext) -> Optional[ReplicationOrder]:
        return None

    def on_request_observed(self, node, name) -> List[ReplicationOrder]:
        return []

    def interest_factor(self, node, name) -> Optional[float]:
        """Per-router value an Interest records on its way upstream."""
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class LeaveCopyEverywhere(CachingStrategy):
    kind = "LCE"

    def decide_on_data(self, node, name, ctx, rng):
        return True


class TwoLru(CachingStrategy):
    """A name-only LRU filters first sightings out of the content store."""

    kind = "TWO_LRU"

    def __init__(self, name_cache_capacity: int = 0):
        super().__init__()
        self.name_cache_capacity = name_cache_capacity

    def init_node(self, node):
        cap = self.name_cache_capacity or node.cs.capacity
        node.strategy_state["name_cache"] = ContentStore(cap, "LRU")

    def decide_on_data(self, node, name, ctx, rng):
        names = node.strategy_state["name_cache"]
        if names.lookup(name):
            return True
        names.insert(name)
        return False


class CacheLessForMore(CachingStrategy):
    """Single copy at the most central router downstream of the source."""

    kind = "CLFM"
    uses_path = True

    def decide_on_data(self, node, name, ctx, rng):
        cent = ctx.centrality
        path = ctx.delivery_path
        best = None
        best_i = -1
        for i in range(1, len(path)):
            v = path[i]
            if v not in self.cache_nodes:
                continue
            if best is None or cent[v] >= best:
                best, best_i = cent[v], i
        return best_i == ctx.x


class ProbCache(CachingStrategy):
    kind = "PROBCACHE"
    uses_path = True

    def __init__(self, t_tw: float = 10.0):
        super().__init__()
        if t_tw <= 0:
            raise ValueError(f"t_tw must be > 0, got {t_tw}")
        self.t_tw = t_tw

    def decide_on_data(self, node, name, ctx, rng):
        return rng.random() < probcache_probability(ctx.c, ctx.x, self.t_tw)


class Magic(CachingStrategy):
    """Single copy at the router with the largest positive gain.

    gain(v) = d(v) * (f_new(v) - f_victim(v)) where d is the hop distance
    from the serving node, f_new the local request count of the incoming
    chunk and f_victim the count of the chunk the store would evict (zero
    while the store has room or when the victim is not known in advance).
    """

    kind = "MAGIC"
    uses_path = True

    def __init__(self, table_capacity: int = 0):
        super().__init__()
        self.table_capacity = table_capacity

    def init_node(self, node):
        cap = self.table_capacity or max(100, 10 * node.cs.capacity)
        node.strategy_state["popularity"] = PopularityTable(cap)

    def on_request_observed(self, node, name):
        if "popularity" in node.strategy_state:
            node.strategy_state["popularity"].observe(name)
        return []

    def interest_factor(self, node, name):
        table = node.strategy_state.get("popularity")
        if table is None or node.cs.capacity == 0:
            return None
        loss = 0
        if node.cs.full:
            victim = node.cs.peek_victim()
            if victim is not None:
                loss = table[victim]
        return table[name] - loss

    @staticmethod
    def gains(ctx: PathContext) -> List[Optional[float]]:
        factors = ctx.gain_factors or ()
        out: List[Optional[float]] = [None] * len(ctx.delivery_path)
        for i in range(1, min(len(factors), len(out))):
            f = factors[i]
            if f is not None:
                out[i] = i * f
        return out

    def decide_on_data(self, node, name, ctx, rng):
        best, best_i = 0.0, -1
        for i, g in enumerate(self.gains(ctx)):
            if g is not None and g > 0 and g >= best:
                best, best_i = g, i
        return best_i == ctx.x


class LeaveCopyDown(CachingStrategy):
    kind = "LCD"
    opportunistic = False
    managed = True

    def on_cache_hit(self, node, name, ctx):
        path = ctx.delivery_path
        if len(path) < 2:
            return None
        return (path[1], name)


class MostPopularCaching(CachingStrategy):
    """Count requests; at the threshold, cache locally and at every neighbour."""

    kind = "MPC"
    opportunistic = False
    managed = True

    def __init__(self, threshold: int = 3, table_capacity: int = 0):
        super().__init__()
        if threshold < 1:
            raise ValueError(f"MPC threshold must be >= 1, got {threshold}")
        self.threshold = threshold
        self.table_capacity = table_capacity

    def init_node(self, node):
        cap = self.table_capacity or max(100, 10 * node.cs.capacity)
        node.strategy_state["popularity"] = PopularityTable(cap)

    def on_request_observed(self, node, name):
        table = node.strategy_state.get("popularity")
        if table is None:
            return []
        if table.observe(name) != self.threshold:
            return []
        orders = [(node.id, name)]
        orders += [(v, name) for v in self.neighbors[node.id] if v in self.cache_nodes]
        return orders


def make_strategy(kind: str, **params) -> CachingStrategy:
    """Build a strategy by name; unknown parameters are ignored."""
    k = kind.upper().replace("-", "_")
    if k == "2LRU" or k == "2_LRU":
        k = "TWO_LRU"
    if k == "LCE":
        return LeaveCopyEverywhere()
    if k == "TWO_LRU":
        return TwoLru(params.get("two_lru_capacity", 0))
    if k == "CLFM":
        return CacheLessForMore()
    if k == "PROBCACHE":
        return ProbCache(params.get("t_tw", 10.0))
    if k == "MAGIC":
        return Magic(params.get("popularity_capacity", 0))
    if k == "LCD":
        return LeaveCopyDown()
    if k == "MPC":
        return MostPopularCaching(params.get("mpc_threshold", 3), params.get("popularity_capacity", 0))
    raise ValueError(f"unknown strategy {kind!r}; choose from {STRATEGIES}")
