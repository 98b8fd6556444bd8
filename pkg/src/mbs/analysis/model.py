"""Periodic task model with per-job segment lists.

Time is integer ticks throughout so fixed points and simulator comparisons
are exact.  Priorities are explicit integers, larger = more urgent, unique
per task set.  A critical-section segment may carry nested critical sections
(toward other resources); group-lock expansion flattens nesting among
resources that share a group, and the analyses reject whatever nesting
remains (transitive blocking is out of scope).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import lcm
from typing import Iterable, Optional, Union

from ..errors import ValidationError


@dataclass(frozen=True, slots=True)
class Exec:
    duration: int


@dataclass(frozen=True, slots=True)
class Cs:
    resource: str
    duration: int                       # execution time of this section itself
    nested: tuple["Cs", ...] = ()       # sections entered while holding this one


Segment = Union[Exec, Cs]


@dataclass(frozen=True, slots=True)
class TaskSpec:
    id: str
    period: int
    wcet: int
    priority: int
    processor: int
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        if not self.segments:
            object.__setattr__(self, "segments", (Exec(self.wcet),))

    def critical_sections(self) -> list[Cs]:
        """All critical sections of one job, outermost first, nested included."""
        out: list[Cs] = []

        def walk(cs: Cs):
            out.append(cs)
            for inner in cs.nested:
                walk(inner)

        for seg in self.segments:
            if isinstance(seg, Cs):
                walk(seg)
        return out

    def total_duration(self) -> int:
        total = 0

        def cs_time(cs: Cs) -> int:
            return cs.duration + sum(cs_time(n) for n in cs.nested)

        for seg in self.segments:
            total += seg.duration if isinstance(seg, Exec) else cs_time(seg)
        return total

    def utilization(self) -> float:
        return self.wcet / self.period


@dataclass(frozen=True, slots=True)
class ResourceSpec:
    id: str
    sync_core: int
    group: Optional[str] = None


@dataclass(frozen=True, slots=True)
class TaskSet:
    tasks: tuple[TaskSpec, ...]
    resources: tuple[ResourceSpec, ...] = ()
    delta: int = 0  # migration overhead per direction

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise ValidationError(f"unknown task {task_id!r}")

    def resource(self, resource_id: str) -> ResourceSpec:
        for r in self.resources:
            if r.id == resource_id:
                return r
        raise ValidationError(f"unknown resource {resource_id!r}")

    def hyperperiod(self) -> int:
        return lcm(*(t.period for t in self.tasks)) if self.tasks else 1


def _check_durations(task: TaskSpec):
    def walk_cs(cs: Cs):
        if cs.duration <= 0:
            raise ValidationError(f"task {task.id}: critical-section durations must be > 0")
        for inner in cs.nested:
            if not isinstance(inner, Cs):
                raise ValidationError(
                    f"task {task.id}: nested entries must be critical sections"
                )
            walk_cs(inner)

    for seg in task.segments:
        if isinstance(seg, Exec):
            if seg.duration <= 0:
                raise ValidationError(f"task {task.id}: segment durations must be > 0")
        elif isinstance(seg, Cs):
            walk_cs(seg)
        else:
            raise ValidationError(f"task {task.id}: unknown segment {seg!r}")


def validate_taskset(ts: TaskSet):
    """Structural validation shared by the analyses and the simulator."""
    ids = [t.id for t in ts.tasks]
    if len(set(ids)) != len(ids):
        raise ValidationError("task ids must be unique")
    prios = [t.priority for t in ts.tasks]
    if len(set(prios)) != len(prios):
        raise ValidationError("priorities must be unique")
    rids = [r.id for r in ts.resources]
    if len(set(rids)) != len(rids):
        raise ValidationError("resource ids must be unique")
    if ts.delta < 0:
        raise ValidationError("migration overhead delta must be >= 0")

    known = set(rids)
    processors = {t.processor for t in ts.tasks}
    sync_cores = {r.sync_core for r in ts.resources}
    if processors & sync_cores:
        raise ValidationError(
            f"processors and synchronization cores must be disjoint; both contain "
            f"{sorted(processors & sync_cores)}"
        )
    for t in ts.tasks:
        if t.period <= 0 or t.wcet <= 0:
            raise ValidationError(f"task {t.id}: period and wcet must be > 0")
        _check_durations(t)
        if t.total_duration() != t.wcet:
            raise ValidationError(
                f"task {t.id}: segment durations sum to {t.total_duration()}, "
                f"wcet is {t.wcet}"
            )
        for cs in t.critical_sections():
            if cs.resource not in known:
                raise ValidationError(f"task {t.id}: unknown resource {cs.resource!r}")


def has_nested_sections(ts: TaskSet) -> bool:
    return any(cs.nested for t in ts.tasks for cs in t.critical_sections())


def require_flat(ts: TaskSet, context: str):
    if has_nested_sections(ts):
        raise ValidationError(
            f"{context} supports nesting only through group locks; expand groups "
            "first (remaining nested critical sections are out of scope)"
        )


def expand_group_locks(ts: TaskSet) -> TaskSet:
    """Merge every group into a single resource; flatten nesting inside a group.

    Resources sharing a group id become one resource named after the group,
    assigned to the first member's synchronization core.  A critical section
    nested inside another section of the same (merged) resource folds into
    the outer one with combined duration.
    """
    groups: dict[str, list[ResourceSpec]] = {}
    for r in ts.resources:
        if r.group is not None:
            groups.setdefault(r.group, []).append(r)
    if not groups:
        return ts

    rename = {}
    for gid, members in groups.items():
        for r in members:
            rename[r.id] = gid
    new_resources = [r for r in ts.resources if r.group is None]
    for gid, members in groups.items():
        new_resources.append(ResourceSpec(id=gid, sync_core=members[0].sync_core))

    def map_cs(cs: Cs) -> Cs:
        rid = rename.get(cs.resource, cs.resource)
        duration = cs.duration
        kept: list[Cs] = []
        for inner in cs.nested:
            inner = map_cs(inner)
            if inner.resource == rid:
                # same merged lock: nesting disappears, durations combine
                duration += inner.duration
                kept.extend(inner.nested)
            else:
                kept.append(inner)
        return Cs(resource=rid, duration=duration, nested=tuple(kept))

    new_tasks = []
    for t in ts.tasks:
        segs = tuple(map_cs(s) if isinstance(s, Cs) else s for s in t.segments)
        new_tasks.append(replace(t, segments=segs))
    return TaskSet(tasks=tuple(new_tasks), resources=tuple(new_resources), delta=ts.delta)
