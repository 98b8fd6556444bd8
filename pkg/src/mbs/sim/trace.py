"""Simulation events, traces, and their CSV exports."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class EventKind(Enum):
    """Trace event kinds; enum order is the tie-break order at equal times."""

    RELEASE = "Release"
    START = "Start"
    PREEMPT = "Preempt"
    CS_ENQUEUE = "CsEnqueue"
    CS_START = "CsStart"
    CS_END = "CsEnd"
    MIGRATE_OUT = "MigrateOut"
    MIGRATE_BACK = "MigrateBack"
    FINISH = "Finish"


_KIND_RANK = {k: i for i, k in enumerate(EventKind)}


def kind_rank(kind: EventKind) -> int:
    return _KIND_RANK[kind]


@dataclass(frozen=True, slots=True)
class SimEvent:
    time: int
    kind: EventKind
    task: str
    core: int


@dataclass(frozen=True, slots=True)
class JobRecord:
    task: str
    release: int
    finish: Optional[int]  # None if still running at the horizon

    @property
    def response(self) -> Optional[int]:
        return None if self.finish is None else self.finish - self.release


@dataclass(frozen=True, slots=True)
class CsServiceRecord:
    resource: str
    task: str
    start: int
    end: int
    core: int
    misses: int  # miss-cost line accesses during this section


@dataclass(frozen=True, slots=True)
class CoreUsage:
    busy: int
    reserved: int
    idle: int


@dataclass
class Trace:
    events: list[SimEvent] = field(default_factory=list)
    jobs: list[JobRecord] = field(default_factory=list)
    cs_services: list[CsServiceRecord] = field(default_factory=list)
    horizon: int = 0
    core_usage: dict[int, CoreUsage] = field(default_factory=dict)

    def service_sequence(self) -> list[tuple[str, str]]:
        """(resource, task) pairs in critical-section service order."""
        ordered = sorted(self.cs_services, key=lambda s: (s.start, s.resource, s.task))
        return [(s.resource, s.task) for s in ordered]


@dataclass(frozen=True, slots=True)
class ObservedResponse:
    max_response: Optional[int]  # None when no job completed
    completed: int
    unfinished: bool


def observed_response_times(trace: Trace) -> dict[str, ObservedResponse]:
    """Per-task maximum response over completed jobs; unfinished jobs flagged."""
    out: dict[str, dict] = {}
    for job in trace.jobs:
        slot = out.setdefault(job.task, {"max": None, "done": 0, "open": False})
        if job.finish is None:
            slot["open"] = True
        else:
            slot["done"] += 1
            if slot["max"] is None or job.response > slot["max"]:
                slot["max"] = job.response
    return {
        task: ObservedResponse(slot["max"], slot["done"], slot["open"])
        for task, slot in out.items()
    }


def write_trace_csv(trace: Trace, f):
    w = csv.writer(f)
    w.writerow(["time", "kind", "task", "core"])
    for ev in trace.events:
        w.writerow([ev.time, ev.kind.value, ev.task, ev.core])


def write_summary_csv(trace: Trace, f, bounds_paper=None, bounds_conservative=None):
    """Per-task summary; bound columns stay empty when not applicable."""
    bounds_paper = bounds_paper or {}
    bounds_conservative = bounds_conservative or {}
    observed = observed_response_times(trace)
    w = csv.writer(f)
    w.writerow(["task", "max_response", "analyzed_bound_paper",
                "analyzed_bound_conservative"])
    for task in sorted(observed):
        obs = observed[task]
        max_resp = "" if obs.max_response is None else obs.max_response
        w.writerow([
            task,
            max_resp,
            bounds_paper.get(task, ""),
            bounds_conservative.get(task, ""),
        ])
