"""Capacity-bounded chunk cache with LRU, FIFO, LFU and RANDOM eviction."""
from __future__ import annotations

import heapq
import random
from collections import OrderedDict
from typing import Hashable, Iterator, Optional

__all__ = ["ContentStore", "POLICIES"]

POLICIES = ("LRU", "FIFO", "LFU", "RANDOM")


class ContentStore:
    """A router's content store.

    ``lookup`` is the only operation that counts as an access: LRU moves the
    entry to the most-recent end, LFU bumps its counter. Inserting a name that
    is already resident behaves like a lookup.

    LFU is in-cache LFU: a counter starts at 1 on insertion and is forgotten
    on eviction. Ties between equal counters go to the oldest insertion.
    """

    def __init__(self, capacity: int, policy: str = "LRU", rng: Optional[random.Random] = None):
        if capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {capacity}")
        policy = policy.upper()
        if policy not in POLICIES:
            raise ValueError(f"unknown replacement policy {policy!r}; choose from {POLICIES}")
        self.capacity = int(capacity)
        self.policy = policy
        self._rng = rng if rng is not None else random.Random(0)
        # LRU/FIFO: ordered dict, oldest first. LFU: name -> [freq, seq].
        # RANDOM: name -> slot in self._slots.
        self._od: "OrderedDict[Hashable, None]" = OrderedDict()
        self._lfu: dict = {}
        self._heap: list = []
        self._seq = 0
        self._pos: dict = {}
        self._slots: list = []

    def __len__(self) -> int:
        if self.policy == "LFU":
            return len(self._lfu)
        if self.policy == "RANDOM":
            return len(self._slots)
        return len(self._od)

    def __contains__(self, name: Hashable) -> bool:
        """Residency test without touching policy metadata."""
        if self.policy == "LFU":
            return name in self._lfu
        if self.policy == "RANDOM":
            return name in self._pos
        return name in self._od

    def __iter__(self) -> Iterator[Hashable]:
        if self.policy == "LFU":
            return iter(list(self._lfu))
        if self.policy == "RANDOM":
            return iter(list(self._slots))
        return iter(list(self._od))

    @property
    def full(self) -> bool:
        return len(self) >= self.capacity

    def frequency(self, name: Hashable) -> int:
        """LFU counter of a resident name (0 if absent or not LFU)."""
        rec = self._lfu.get(name)
        return rec[0] if rec else 0

    def lookup(self, name: Hashable) -> bool:
        pol = self.policy
        if pol == "LRU":
            od = self._od
            if name in od:
                od.move_to_end(name)
                return True
            return False
        if pol == "FIFO":
            return name in self._od
        if pol == "LFU":
            rec = self._lfu.get(name)
            if rec is None:
                return False
            rec[0] += 1
            heapq.heappush(self._heap, (rec[0], rec[1], name))
            if len(self._heap) > 4 * len(self._lfu) + 64:
                self._heap = [(f, s, n) for n, (f, s) in self._lfu.items()]
                heapq.heapify(self._heap)
            return True
        return name in self._pos

    def peek_victim(self) -> Optional[Hashable]:
        """The name the next eviction would remove, if deterministic.

        RANDOM returns None because its victim is only fixed when drawn.
        """
        if len(self) == 0 or self.policy == "RANDOM":
            return None
        if self.policy == "LFU":
            self._prune()
            return self._heap[0][2]
        return next(iter(self._od))

    def insert(self, name: Hashable) -> Optional[Hashable]:
        """Make ``name`` resident and return the evicted name, if any.

        With capacity 0 this is a no-op that returns None.
        """
        if self.capacity == 0:
            return None
        if name in self:
            self.lookup(name)
            return None
        victim = None
        if len(self) >= self.capacity:
            victim = self._evict()
        pol = self.policy
        if pol == "LFU":
            self._seq += 1
            self._lfu[name] = [1, self._seq]
            heapq.heappush(self._heap, (1, self._seq, name))
        elif pol == "RANDOM":
            self._pos[name] = len(self._slots)
            self._slots.append(name)
        else:
            self._od[name] = None
        return victim

    def remove(self, name: Hashable) -> bool:
        if name not in self:
            return False
        pol = self.policy
        if pol == "LFU":
            del self._lfu[name]
        elif pol == "RANDOM":
            self._drop_slot(self._pos[name])
        else:
            del self._od[name]
        return True

    def _evict(self) -> Hashable:
        pol = self.policy
        if pol == "LFU":
            self._prune()
            _, _, victim = heapq.heappop(self._heap)
            del self._lfu[victim]
            return victim
        if pol == "RANDOM":
            i = self._rng.randrange(len(self._slots))
            victim = self._slots[i]
            self._drop_slot(i)
            return victim
        victim, _ = self._od.popitem(last=False)
        return victim

    def _drop_slot(self, i: int) -> None:
        slots = self._slots
        victim = slots[i]
        last = slots.pop()
        if i < len(slots):
            slots[i] = last
            self._pos[last] = i
        del self._pos[victim]

    def _prune(self) -> None:
        # discard heap records made stale by later counter bumps or eviction
        heap, lfu = self._heap, self._lfu
        while heap:
            f, s, name = heap[0]
            rec = lfu.get(name)
            if rec is not None and rec[0] == f and rec[1] == s:
                return
            heapq.heappop(heap)
