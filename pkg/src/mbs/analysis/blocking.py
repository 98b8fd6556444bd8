"""Blocking bounds for migrating critical sections and FIFO spinlocks.

All bounds return a local/remote split as used by the response-time
recurrence.  For migrating protocols every contention is resolved at the
remote synchronization core, so the local part is zero and the remote part
carries both the wait and the two per-section migrations (2 * delta).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from .model import TaskSet, TaskSpec, require_flat, validate_taskset


@dataclass(frozen=True, slots=True)
class BlockingBound:
    local: int
    remote: int

    @property
    def total(self) -> int:
        return self.local + self.remote


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _check_exclusive_sync_cores(ts: TaskSet):
    seen: dict[int, str] = {}
    for r in ts.resources:
        if r.sync_core in seen:
            raise ValidationError(
                f"resources {seen[r.sync_core]!r} and {r.id!r} share synchronization "
                f"core {r.sync_core}; the bounds assume one resource per core, use a "
                "group lock to model shared cores"
            )
        seen[r.sync_core] = r.id


def _longest_cs_by_task(ts: TaskSet, resource: str) -> dict[str, int]:
    longest: dict[str, int] = {}
    for t in ts.tasks:
        for cs in t.critical_sections():
            if cs.resource == resource:
                longest[t.id] = max(longest.get(t.id, 0), cs.duration)
    return longest


def blocking_mbs_per_section(task: TaskSpec, ts: TaskSet, window: int | None = None
                             ) -> BlockingBound:
    """Per-section bound: one longest competing section, plus migrations.

    Requests are granted non-preemptively in priority order at the core, so a
    section waits for at most one other user of its resource, whichever
    priority that user has.
    """
    validate_taskset(ts)
    require_flat(ts, "blocking analysis")
    _check_exclusive_sync_cores(ts)
    remote = 0
    for cs in task.critical_sections():
        others = [d for tid, d in _longest_cs_by_task(ts, cs.resource).items()
                  if tid != task.id]
        remote += (max(others) if others else 0) + 2 * ts.delta
    return BlockingBound(local=0, remote=remote)


def blocking_mbs_conservative(task: TaskSpec, ts: TaskSet, window: int | None = None
                              ) -> BlockingBound:
    """Window-based companion bound: every competing job inside the window.

    Each other task sharing the resource contributes ceil(window / period)
    jobs of its longest section.  Monotone non-decreasing in the window, and
    never below the per-section bound for the same task set.
    """
    if window is None or window <= 0:
        raise ValidationError("the conservative bound needs a window > 0")
    validate_taskset(ts)
    require_flat(ts, "blocking analysis")
    _check_exclusive_sync_cores(ts)
    remote = 0
    for cs in task.critical_sections():
        longest = _longest_cs_by_task(ts, cs.resource)
        for other in ts.tasks:
            if other.id == task.id or other.id not in longest:
                continue
            remote += _ceil_div(window, other.period) * longest[other.id]
        remote += 2 * ts.delta
    return BlockingBound(local=0, remote=remote)


def blocking_spin_fifo(task: TaskSpec, ts: TaskSet, window: int | None = None
                       ) -> BlockingBound:
    """FIFO spinlock baseline: one section per other processor, per section.

    Local blocking is one longest critical section of a lower-priority task
    on the same processor (the spin is non-preemptive), once per job.
    """
    validate_taskset(ts)
    require_flat(ts, "blocking analysis")
    remote = 0
    for cs in task.critical_sections():
        per_proc: dict[int, int] = {}
        for other in ts.tasks:
            if other.id == task.id or other.processor == task.processor:
                continue
            for ocs in other.critical_sections():
                if ocs.resource == cs.resource:
                    per_proc[other.processor] = max(
                        per_proc.get(other.processor, 0), ocs.duration
                    )
        remote += sum(per_proc.values())
    local = 0
    for other in ts.tasks:
        if other.processor == task.processor and other.priority < task.priority:
            for ocs in other.critical_sections():
                local = max(local, ocs.duration)
    return BlockingBound(local=local, remote=remote)
