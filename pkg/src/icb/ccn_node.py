"""Per-router CCN forwarding state: content store, PIT and FIB.

An Interest is handled strictly in the order CS -> PIT -> FIB. A Data
message consumes the PIT entry for its name, asks the caching strategy
whether to keep a copy, and fans out to every face recorded in the entry.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from .content_store import ContentStore
from .topology import Topology, shortest_path

__all__ = [
    "ContentName",
    "CLIENT",
    "Action",
    "Decision",
    "PitEntry",
    "NodeState",
    "RoutingError",
    "process_interest",
    "process_data",
    "populate_fib",
]

# Face id for end users attached directly to a router.
CLIENT = -1


class ContentName(NamedTuple):
    """``/object/chunk``; tuples order lexicographically, as required."""

    object: int
    chunk: int = 0

    def __str__(self) -> str:
        return f"/obj{self.object}/chunk{self.chunk}"


class RoutingError(RuntimeError):
    """Interest reached a router with no FIB route to the producer."""


class Action(enum.Enum):
    SERVE_FROM_CS = "serve_from_cs"
    SERVE_FROM_PRODUCER = "serve_from_producer"
    AGGREGATED = "aggregated"
    FORWARD = "forward"


class Decision(NamedTuple):
    action: Action
    next_hop: Optional[int] = None


@dataclass
class PitEntry:
    name: ContentName
    created_at: float
    # face -> metadata carried by the Interest that arrived on it
    # (the engine stores the hop trail there). Insertion ordered, so the
    # first key is the face whose Interest was forwarded upstream.
    faces: Dict[int, Any] = field(default_factory=dict)
    clients: List[Any] = field(default_factory=list)


@dataclass
class NodeState:
    id: int
    cs: ContentStore
    next_hop: Optional[int] = None
    is_producer: bool = False
    pit_timeout: float = float("inf")
    pit: Dict[ContentName, PitEntry] = field(default_factory=dict)
    strategy_state: Dict[str, Any] = field(default_factory=dict)
    cs_hits: int = 0
    cs_misses: int = 0
    aggregated: int = 0
    unsolicited: int = 0
    pit_expired: int = 0


def process_interest(
    node: NodeState,
    name: ContentName,
    face: int,
    now: float,
    meta: Any = None,
    client_tag: Any = None,
) -> Decision:
    """Run one Interest through the CS -> PIT -> FIB pipeline.

    ``meta`` is stored against ``face`` when a PIT entry is created or
    joined. ``client_tag`` identifies the waiting request when ``face`` is
    :data:`CLIENT`.
    """
    if node.is_producer:
        return Decision(Action.SERVE_FROM_PRODUCER)
    if node.cs.lookup(name):
        node.cs_hits += 1
        return Decision(Action.SERVE_FROM_CS)
    node.cs_misses += 1
    entry = node.pit.get(name)
    if entry is not None and now - entry.created_at > node.pit_timeout:
        del node.pit[name]
        node.pit_expired += 1
        entry = None
    if entry is not None:
        if face not in entry.faces:
            entry.faces[face] = meta
        if face == CLIENT:
            entry.clients.append(client_tag)
        node.aggregated += 1
        return Decision(Action.AGGREGATED)
    if node.next_hop is None:
        raise RoutingError(f"node {node.id} has no route for {name}")
    entry = PitEntry(name, now)
    entry.faces[face] = meta
    if face == CLIENT:
        entry.clients.append(client_tag)
    node.pit[name] = entry
    return Decision(Action.FORWARD, node.next_hop)


def process_data(
    node: NodeState,
    name: ContentName,
    strategy,
    ctx,
    rng,
    now: float,
) -> Optional[Tuple[PitEntry, bool]]:
    """Consume the PIT entry for ``name`` and apply the caching decision.

    Returns ``(entry, cached)`` where ``entry.faces`` is the fan-out set,
    or None for unsolicited Data (counted and dropped).
    """
    entry = node.pit.pop(name, None)
    if entry is None:
        node.unsolicited += 1
        return None
    cached = False
    if node.cs.capacity > 0 and strategy.decide_on_data(node, name, ctx, rng):
        node.cs.insert(name)
        cached = True
    return entry, cached


def populate_fib(topo: Topology, producer: int) -> Dict[int, Optional[int]]:
    """Next hop toward ``producer`` for every node (None at the producer)."""
    topo.check_node(producer)
    fib: Dict[int, Optional[int]] = {}
    for v in topo.nodes:
        fib[v] = None if v == producer else shortest_path(topo, v, producer)[1]
    return fib
