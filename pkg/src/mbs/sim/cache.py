"""Per-line ownership and LRU residency model for critical-section data.

Every critical section touches each line of its resource once.  An access
hits when the executing core both owns the line and still holds it resident;
otherwise it misses, ownership moves, and the line becomes most-recently
used on the accessing core (evicting the LRU line beyond capacity).
Ownership changes only on access; eviction only drops residency.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import Mapping


class CacheState:
    def __init__(self, line_count: Mapping[str, int], l1_capacity_lines: int,
                 hit_cost: int, miss_cost: int):
        if hit_cost > miss_cost:
            raise ValueError("hit_cost must be <= miss_cost")
        if l1_capacity_lines < 1:
            raise ValueError("l1_capacity_lines must be >= 1")
        self.line_count = dict(line_count)
        self.capacity = l1_capacity_lines
        self.hit_cost = hit_cost
        self.miss_cost = miss_cost
        self._owner: dict[tuple[str, int], int] = {}
        self._resident: dict[int, OrderedDict] = {}

    def _touch(self, core: int, line: tuple[str, int]):
        resident = self._resident.setdefault(core, OrderedDict())
        if line in resident:
            resident.move_to_end(line)
        else:
            resident[line] = None
            if len(resident) > self.capacity:
                resident.popitem(last=False)

    def access_resource(self, resource: str, core: int) -> tuple[int, int]:
        """Touch all lines of ``resource`` from ``core``; returns (cost, misses)."""
        lines = self.line_count.get(resource, 0)
        cost = 0
        misses = 0
        for i in range(lines):
            line = (resource, i)
            resident = self._resident.get(core)
            if self._owner.get(line) == core and resident is not None and line in resident:
                cost += self.hit_cost
            else:
                cost += self.miss_cost
                misses += 1
            self._owner[line] = core
            self._touch(core, line)
        return cost, misses

    def resident_count(self, core: int) -> int:
        return len(self._resident.get(core, ()))
