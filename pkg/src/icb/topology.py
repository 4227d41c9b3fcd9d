"""Router graph, deterministic hop-count routing and betweenness centrality.

Topology files are plain edge lists::

    # nodes=3 edges=3
    # provenance: hand-made triangle
    0 1 5.0
    1 2 5.0
    0 2 5.0

Node ids must be consecutive integers starting at 0. Delays are link
propagation delays in milliseconds.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

__all__ = [
    "Topology",
    "TopologyError",
    "load_topology",
    "load_builtin",
    "BUILTIN_TOPOLOGIES",
    "shortest_path",
    "hop_distances",
    "betweenness",
    "diameter",
    "default_producer",
]

BUILTIN_TOPOLOGIES = ("abilene", "dtelecom")


class TopologyError(ValueError):
    """Raised for malformed or invalid topology documents."""


@dataclass(frozen=True)
class Topology:
    name: str
    n_nodes: int
    edges: Tuple[Tuple[int, int, float], ...]
    adjacency: Tuple[Tuple[int, ...], ...] = field(repr=False, compare=False, default=())
    _delay: Dict[Tuple[int, int], float] = field(repr=False, compare=False, default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence], name: str = "", n_nodes: Optional[int] = None) -> "Topology":
        """Build and validate a topology from ``(a, b, delay_ms)`` triples."""
        clean = []
        seen = set()
        top = -1
        for i, e in enumerate(edges):
            a, b = int(e[0]), int(e[1])
            d = float(e[2]) if len(e) > 2 else 1.0
            if a < 0 or b < 0:
                raise TopologyError(f"edge {i} ({a}, {b}): negative node id")
            if a == b:
                raise TopologyError(f"edge {i} ({a}, {b}): self-loop")
            if not (d >= 0.0) or d == float("inf"):
                raise TopologyError(f"edge {i} ({a}, {b}): delay must be finite and >= 0, got {d}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise TopologyError(f"edge {i} ({a}, {b}): duplicate edge")
            seen.add(key)
            clean.append((a, b, d))
            top = max(top, a, b)
        n = top + 1 if n_nodes is None else n_nodes
        if n < 1:
            raise TopologyError("topology has no nodes")
        if top >= n:
            raise TopologyError(f"node id {top} out of range for {n} nodes")
        adj: List[List[int]] = [[] for _ in range(n)]
        delay: Dict[Tuple[int, int], float] = {}
        for a, b, d in clean:
            adj[a].append(b)
            adj[b].append(a)
            delay[(a, b)] = d
            delay[(b, a)] = d
        topo = cls(
            name=name,
            n_nodes=n,
            edges=tuple(clean),
            adjacency=tuple(tuple(sorted(x)) for x in adj),
            _delay=delay,
        )
        reached = hop_distances(topo, 0)
        missing = [v for v in range(n) if reached[v] < 0]
        if missing:
            raise TopologyError(f"topology is disconnected: node(s) {missing[:5]} unreachable from node 0")
        return topo

    @property
    def nodes(self) -> range:
        return range(self.n_nodes)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def delay(self, a: int, b: int) -> float:
        """Propagation delay of link ``a``-``b`` in milliseconds."""
        return self._delay[(a, b)]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def path_delay(self, path: Sequence[int]) -> float:
        return sum(self._delay[(path[i], path[i + 1])] for i in range(len(path) - 1))

    def check_node(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n_nodes):
            raise TopologyError(f"unknown node id {v!r}")


def load_topology(source: Union[str, Path], name: Optional[str] = None) -> Topology:
    """Parse an edge-list document.

    ``source`` is either a path to a file or the document text itself
    (anything containing a newline is treated as text).
    """
    if isinstance(source, Path) or ("\n" not in source and Path(source).exists()):
        path = Path(source)
        text = path.read_text()
        name = name or path.stem
    else:
        text = source
    edges = []
    declared = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, _, v = tok.partition("=")
                    declared[k] = v
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TopologyError(f"line {lineno}: expected '<nodeA> <nodeB> <delay_ms>', got {raw!r}")
        try:
            a, b, d = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise TopologyError(f"line {lineno}: cannot parse {raw!r}") from None
        if d < 0:
            raise TopologyError(f"line {lineno}: negative delay on edge ({a}, {b})")
        edges.append((a, b, d))
    n_nodes = None
    if not edges and declared.get("nodes", "").isdigit():
        n_nodes = int(declared["nodes"])
    topo = Topology.from_edges(edges, name=name or "", n_nodes=n_nodes)
    if "nodes" in declared and int(declared["nodes"]) != topo.n_nodes:
        raise TopologyError(f"header declares nodes={declared['nodes']} but file has {topo.n_nodes}")
    if "edges" in declared and int(declared["edges"]) != len(topo.edges):
        raise TopologyError(f"header declares edges={declared['edges']} but file has {len(topo.edges)}")
    return topo


def load_builtin(name: str) -> Topology:
    """Load one of the topologies shipped with the package."""
    key = name.lower()
    if key not in BUILTIN_TOPOLOGIES:
        raise TopologyError(f"unknown built-in topology {name!r}; choose from {BUILTIN_TOPOLOGIES}")
    text = resources.files("icb.data").joinpath(f"{key}.txt").read_text()
    return load_topology(text, name=key)


def hop_distances(topo: Topology, src: int) -> List[int]:
    """BFS hop counts from ``src``; -1 marks unreachable nodes."""
    dist = [-1] * topo.n_nodes
    dist[src] = 0
    queue = deque([src])
    adj = topo.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _greedy_path(topo: Topology, src: int, dst: int) -> List[int]:
    # Walking down the BFS gradient of dst, always taking the smallest
    # neighbour, yields the lexicographically smallest minimum-hop path.
    dist = hop_distances(topo, dst)
    path = [src]
    cur = src
    while cur != dst:
        want = dist[cur] - 1
        cur = next(w for w in topo.adjacency[cur] if dist[w] == want)
        path.append(cur)
    return path


def shortest_path(topo: Topology, src: int, dst: int) -> List[int]:
    """Minimum-hop path from ``src`` to ``dst``.

    Ties are broken by the lexicographically smallest node sequence read
    from the smaller endpoint, so ``shortest_path(t, b, a)`` is always the
    reverse of ``shortest_path(t, a, b)``.
    """
    topo.check_node(src)
    topo.check_node(dst)
    if src <= dst:
        return _greedy_path(topo, src, dst)
    return _greedy_path(topo, dst, src)[::-1]


def betweenness(topo: Topology) -> Dict[int, float]:
    """Unnormalized betweenness centrality on hop-count shortest paths.

    Brandes' accumulation; each unordered pair contributes once, with
    fractional credit split evenly across equal-length paths.
    """
    n = topo.n_nodes
    adj = topo.adjacency
    score = [0.0] * n
    for s in range(n):
        stack = []
        preds: List[List[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    return {v: score[v] / 2.0 for v in range(n)}


def diameter(topo: Topology) -> int:
    return max(max(hop_distances(topo, v)) for v in topo.nodes)


def default_producer(topo: Topology, centrality: Optional[Dict[int, float]] = None) -> int:
    """Farthest degree-1 node from the most central router.

    Falls back to the farthest node of any degree when the graph has no
    leaves. Ties go to the smallest node id.
    """
    if topo.n_nodes == 1:
        return 0
    cent = centrality if centrality is not None else betweenness(topo)
    hub = min(topo.nodes, key=lambda v: (-cent[v], v))
    dist = hop_distances(topo, hub)
    leaves = [v for v in topo.nodes if topo.degree(v) == 1]
    pool = leaves or [v for v in topo.nodes if v != hub]
    return min(pool, key=lambda v: (-dist[v], v))
