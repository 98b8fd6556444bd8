"""Deterministic discrete-event simulator for partitioned fixed-priority
scheduling with pluggable synchronization protocols.

Application cores run preemptive fixed-priority scheduling; jobs release
synchronously at t=0 and periodically to the horizon (capped at the
hyperperiod).  Critical sections are served per protocol:

* ``MBS``: the job migrates to the resource's synchronization core
  (``migration_cost`` ticks each way, paid off-core); the core serves one
  section at a time, admission in priority order with FIFO ties (or pure
  FIFO), non-preemptively; the origin core is freed meanwhile.
* ``MBS_R``: as MBS, but the origin core stays reserved (idle) until the job
  has migrated back.
* ``SPIN_FIFO``: non-preemptive busy wait on the caller's core in ticket
  order; the section then runs on that core.
* ``MUTEX``: suspend in FIFO order, core freed; the granted section runs
  preemptively on the caller's core.

Each section access to a cache line costs ``hit_cost`` when the executing
core owns the resident line, else ``miss_cost`` (ownership transfers, LRU
residency per core); section service time is the declared duration plus the
access costs.  Simultaneous events are processed in a fixed order: event
kind first (release, run completion, queue entry, section end, migration
return), then task id.  Time is integer ticks.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from ..errors import ValidationError
from ..analysis.model import (
    Exec,
    TaskSet,
    TaskSpec,
    expand_group_locks,
    require_flat,
    validate_taskset,
)
from .cache import CacheState
from .trace import (
    CoreUsage,
    CsServiceRecord,
    EventKind,
    JobRecord,
    SimEvent,
    Trace,
)


class SimProtocol(Enum):
    MBS = "mbs"
    MBS_R = "mbs-r"
    SPIN_FIFO = "spin-fifo"
    MUTEX = "mutex"


class AdmissionOrder(Enum):
    PRIORITY = "priority"  # FIFO ties
    FIFO = "fifo"


@dataclass(frozen=True)
class SimParams:
    protocol: SimProtocol = SimProtocol.MBS
    migration_cost: Optional[int] = None      # None -> task set's delta
    resource_lines: Mapping[str, int] = field(default_factory=dict)
    hit_cost: int = 0
    miss_cost: int = 0
    l1_capacity_lines: int = 64
    horizon: Optional[int] = None             # None -> hyperperiod
    admission: AdmissionOrder = AdmissionOrder.PRIORITY
    seed: int = 0                             # recorded; used by generation pipelines

    def __post_init__(self):
        if self.hit_cost > self.miss_cost:
            raise ValidationError("hit_cost must be <= miss_cost")
        if self.hit_cost < 0 or self.miss_cost < 0:
            raise ValidationError("cache costs must be >= 0")
        if self.horizon is not None and self.horizon <= 0:
            raise ValidationError("horizon must be > 0")
        if self.migration_cost is not None and self.migration_cost < 0:
            raise ValidationError("migration_cost must be >= 0")


# engine event ranks, mirroring the trace kind order at equal times
_RANK_RELEASE = 0
_RANK_EXEC_DONE = 1
_RANK_CS_ARRIVE = 3
_RANK_CS_DONE = 5
_RANK_RETURN = 7


class _Job:
    __slots__ = ("task", "release", "seq", "chunks", "idx", "remaining",
                 "epoch", "state", "lock_held", "cs_started", "cs_cost",
                 "cs_misses", "cs_start_t", "chunk_start", "finish")

    def __init__(self, task: TaskSpec, release: int, seq: int, chunks):
        self.task = task
        self.release = release
        self.seq = seq
        self.chunks = chunks
        self.idx = 0
        self.remaining = 0
        self.epoch = 0
        self.state = "ready"
        self.lock_held = False
        self.cs_started = False
        self.cs_cost = 0
        self.cs_misses = 0
        self.cs_start_t = 0
        self.chunk_start = 0  # when the chunk now in progress last resumed
        self.finish = None

    @property
    def head(self):
        return self.chunks[self.idx] if self.idx < len(self.chunks) else None


class _Core:
    __slots__ = ("core_id", "ready", "running", "running_since", "reserved_by",
                 "reserved_since", "busy", "reserved")

    def __init__(self, core_id: int):
        self.core_id = core_id
        self.ready: list = []
        self.running: Optional[_Job] = None
        self.running_since = 0
        self.reserved_by: Optional[_Job] = None
        self.reserved_since = 0
        self.busy = 0
        self.reserved = 0


def _build_chunks(task: TaskSpec):
    chunks = []
    for seg in task.segments:
        if isinstance(seg, Exec):
            if chunks and chunks[-1][0] == "exec":
                chunks[-1] = ("exec", chunks[-1][1] + seg.duration, None)
            else:
                chunks.append(("exec", seg.duration, None))
        else:
            chunks.append(("cs", seg.duration, seg.resource))
    return chunks


class _Engine:
    def __init__(self, ts: TaskSet, params: SimParams):
        self.ts = ts
        self.params = params
        self.protocol = params.protocol
        self.delta = ts.delta if params.migration_cost is None else params.migration_cost
        self.horizon = ts.hyperperiod() if params.horizon is None \
            else min(params.horizon, ts.hyperperiod())
        self.cache = CacheState(params.resource_lines, params.l1_capacity_lines,
                                params.hit_cost, params.miss_cost)
        self.trace = Trace(horizon=self.horizon)
        self.occupancy: list[tuple[int, str, int, int]] = []

        self.cores = {p: _Core(p) for p in sorted({t.processor for t in ts.tasks})}
        self.resource_core = {r.id: r.sync_core for r in ts.resources}
        self.sync_cores = sorted(set(self.resource_core.values()))
        self.sync_queue: dict[int, list] = {c: [] for c in self.sync_cores}
        self.sync_running: dict[int, Optional[_Job]] = {c: None for c in self.sync_cores}
        self.sync_busy: dict[int, int] = {c: 0 for c in self.sync_cores}

        self.spin_queue: dict[str, list] = {r.id: [] for r in ts.resources}
        self.holder: dict[str, Optional[_Job]] = {r.id: None for r in ts.resources}

        self.heap: list = []
        self.ev_seq = itertools.count()
        self.job_seq = itertools.count()
        self.arrive_seq = itertools.count()
        self.chunk_proto = {t.id: _build_chunks(t) for t in ts.tasks}
        self._jobs_open: dict[str, list] = {}

    # -- plumbing ----------------------------------------------------------

    def _push(self, time: int, rank: int, job_or_task, payload):
        task_id = job_or_task.task.id if isinstance(job_or_task, _Job) else job_or_task.id
        heapq.heappush(self.heap, (time, rank, task_id, next(self.ev_seq), payload))

    def _emit(self, time: int, kind: EventKind, task: str, core: int):
        self.trace.events.append(SimEvent(time, kind, task, core))

    def _occupy(self, core: _Core, job: _Job, t: int):
        core.running = job
        core.running_since = t

    def _vacate(self, core: _Core, t: int):
        job = core.running
        if job is not None:
            core.busy += t - core.running_since
            self.occupancy.append((core.core_id, job.task.id, core.running_since, t))
            core.running = None

    def _reserve(self, core: _Core, job: _Job, t: int):
        core.reserved_by = job
        core.reserved_since = t

    def _unreserve(self, core: _Core, t: int):
        if core.reserved_by is not None:
            core.reserved += t - core.reserved_since
            core.reserved_by = None

    def _ready_push(self, job: _Job, t: int):
        core = self.cores[job.task.processor]
        heapq.heappush(core.ready, (-job.task.priority, job.release, job.seq, job))
        job.state = "ready"

    # -- job lifecycle -------------------------------------------------------

    @staticmethod
    def _load_chunk(job: _Job):
        """Arm ``remaining`` for the chunk at the current index."""
        head = job.head
        job.remaining = head[1] if head is not None and head[0] == "exec" else 0

    def _release(self, task: TaskSpec, t: int):
        if t >= self.horizon:
            return
        job = _Job(task, t, next(self.job_seq), list(self.chunk_proto[task.id]))
        self._load_chunk(job)
        self._jobs_open.setdefault(task.id, []).append(job)
        self._emit(t, EventKind.RELEASE, task.id, task.processor)
        self._advance_offcore(job, t)
        self._push(t + task.period, _RANK_RELEASE, task, ("release", task))

    def _finish(self, job: _Job, t: int):
        job.finish = t
        job.state = "done"
        self._emit(t, EventKind.FINISH, job.task.id, job.task.processor)

    def _advance_offcore(self, job: _Job, t: int):
        """Job is not occupying its core; park it ready or finish it."""
        if job.head is None:
            self._finish(job, t)
        else:
            self._ready_push(job, t)

    def _advance_inline(self, job: _Job, t: int):
        """Job occupies its core and its current chunk just ended."""
        core = self.cores[job.task.processor]
        head = job.head
        if head is None:
            self._vacate(core, t)
            self._finish(job, t)
        elif head[0] == "cs":
            self._reach_cs(job, t, on_core=True)
        else:
            # continue with the next execution chunk, still preemptible
            job.state = "running"
            job.chunk_start = t
            job.epoch += 1
            self._push(t + job.remaining, _RANK_EXEC_DONE, job,
                       ("exec_done", job, job.epoch))

    # -- critical-section entry ----------------------------------------------

    def _reach_cs(self, job: _Job, t: int, on_core: bool):
        """Process the job hitting its lock call at time t."""
        _, duration, resource = job.head
        core = self.cores[job.task.processor]
        proto = self.protocol

        if proto in (SimProtocol.MBS, SimProtocol.MBS_R):
            self._emit(t, EventKind.CS_ENQUEUE, job.task.id, core.core_id)
            self._emit(t, EventKind.MIGRATE_OUT, job.task.id, core.core_id)
            if on_core:
                self._vacate(core, t)
            if proto is SimProtocol.MBS_R:
                self._reserve(core, job, t)
            job.state = "migrating"
            if self.delta > 0:
                self._push(t + self.delta, _RANK_CS_ARRIVE, job, ("cs_arrive", job))
            else:
                self._sync_enqueue(job, t)
            return

        if proto is SimProtocol.SPIN_FIFO:
            if not on_core:
                self._occupy(core, job, t)
                self._emit(t, EventKind.START, job.task.id, core.core_id)
            self._emit(t, EventKind.CS_ENQUEUE, job.task.id, core.core_id)
            job.state = "spinning"
            self.spin_queue[resource].append((next(self.arrive_seq), job))
            return

        # MUTEX: suspend in FIFO order unless immediately grantable
        self._emit(t, EventKind.CS_ENQUEUE, job.task.id, core.core_id)
        if self.holder[resource] is None and not self.spin_queue[resource]:
            self.holder[resource] = job
            job.lock_held = True
            if not on_core:
                self._occupy(core, job, t)
                self._emit(t, EventKind.START, job.task.id, core.core_id)
            self._start_local_cs(job, t)
        else:
            self.spin_queue[resource].append((next(self.arrive_seq), job))
            if on_core:
                self._vacate(core, t)
            job.state = "lock_wait"

    def _start_local_cs(self, job: _Job, t: int):
        """Begin running a held section on the job's own core (mutex path)."""
        _, duration, resource = job.head
        core = self.cores[job.task.processor]
        cost, misses = self.cache.access_resource(resource, core.core_id)
        job.cs_cost = duration + cost
        job.cs_misses = misses
        job.cs_start_t = t
        job.cs_started = True
        job.remaining = job.cs_cost
        job.state = "running_cs"
        job.chunk_start = t
        job.epoch += 1
        self._emit(t, EventKind.CS_START, job.task.id, core.core_id)
        self._push(t + job.remaining, _RANK_EXEC_DONE, job,
                   ("exec_done", job, job.epoch))

    # -- MBS sync-core service -------------------------------------------------

    def _sync_enqueue(self, job: _Job, t: int):
        _, duration, resource = job.head
        score = self.resource_core[resource]
        seq = next(self.arrive_seq)
        if self.params.admission is AdmissionOrder.PRIORITY:
            key = (-job.task.priority, seq)
        else:
            key = (seq,)
        heapq.heappush(self.sync_queue[score], (key, seq, job))
        job.state = "cs_queued"

    def _grant_sync(self, t: int) -> bool:
        changed = False
        for score in self.sync_cores:
            if self.sync_running[score] is not None or not self.sync_queue[score]:
                continue
            if t >= self.horizon:
                continue
            _, _, job = heapq.heappop(self.sync_queue[score])
            _, duration, resource = job.head
            cost, misses = self.cache.access_resource(resource, score)
            job.cs_cost = duration + cost
            job.cs_misses = misses
            job.cs_start_t = t
            job.state = "in_cs_remote"
            self.sync_running[score] = job
            self.sync_busy[score] += min(t + job.cs_cost, self.horizon) - t
            self._emit(t, EventKind.CS_START, job.task.id, score)
            self._push(t + job.cs_cost, _RANK_CS_DONE, job, ("cs_done", job))
            changed = True
        return changed

    def _grant_spin(self, t: int) -> bool:
        if self.protocol is not SimProtocol.SPIN_FIFO:
            return False
        changed = False
        for resource in sorted(self.spin_queue):
            queue = self.spin_queue[resource]
            if self.holder[resource] is not None or not queue:
                continue
            if t >= self.horizon:
                continue
            queue.sort()
            _, job = queue.pop(0)
            self.holder[resource] = job
            core = self.cores[job.task.processor]
            cost, misses = self.cache.access_resource(resource, core.core_id)
            job.cs_cost = job.head[1] + cost
            job.cs_misses = misses
            job.cs_start_t = t
            job.state = "in_cs_spin"
            self._emit(t, EventKind.CS_START, job.task.id, core.core_id)
            self._push(t + job.cs_cost, _RANK_CS_DONE, job, ("cs_done", job))
            changed = True
        return changed

    def _grant_mutex(self, t: int) -> bool:
        if self.protocol is not SimProtocol.MUTEX:
            return False
        changed = False
        for resource in sorted(self.spin_queue):
            queue = self.spin_queue[resource]
            if self.holder[resource] is not None or not queue:
                continue
            queue.sort()
            _, job = queue.pop(0)
            self.holder[resource] = job
            job.lock_held = True
            self._ready_push(job, t)
            changed = True
        return changed

    # -- event handlers ----------------------------------------------------

    def _on_exec_done(self, job: _Job, epoch: int, t: int):
        if job.epoch != epoch or job.state not in ("running", "running_cs"):
            return
        core = self.cores[job.task.processor]
        if job.state == "running_cs":
            _, _, resource = job.head
            self._emit(t, EventKind.CS_END, job.task.id, core.core_id)
            self.trace.cs_services.append(CsServiceRecord(
                resource=resource, task=job.task.id, start=job.cs_start_t,
                end=t, core=core.core_id, misses=job.cs_misses))
            self.holder[resource] = None
            job.lock_held = False
            job.cs_started = False
        job.idx += 1
        self._load_chunk(job)
        self._advance_inline(job, t)

    def _on_cs_done(self, job: _Job, t: int):
        _, duration, resource = job.head
        if job.state == "in_cs_spin":
            core = self.cores[job.task.processor]
            self._emit(t, EventKind.CS_END, job.task.id, core.core_id)
            self.trace.cs_services.append(CsServiceRecord(
                resource=resource, task=job.task.id, start=job.cs_start_t,
                end=t, core=core.core_id, misses=job.cs_misses))
            self.holder[resource] = None
            job.idx += 1
            self._load_chunk(job)
            self._advance_inline(job, t)
            return
        # remote service on the synchronization core
        score = self.resource_core[resource]
        self._emit(t, EventKind.CS_END, job.task.id, score)
        self.trace.cs_services.append(CsServiceRecord(
            resource=resource, task=job.task.id, start=job.cs_start_t,
            end=t, core=score, misses=job.cs_misses))
        self.sync_running[score] = None
        self._emit(t, EventKind.MIGRATE_BACK, job.task.id, job.task.processor)
        job.idx += 1
        self._load_chunk(job)
        job.state = "returning"
        if self.delta > 0:
            self._push(t + self.delta, _RANK_RETURN, job, ("return_done", job))
        else:
            self._on_return(job, t)

    def _on_return(self, job: _Job, t: int):
        if self.protocol is SimProtocol.MBS_R:
            self._unreserve(self.cores[job.task.processor], t)
        self._advance_offcore(job, t)

    # -- dispatching ---------------------------------------------------------

    def _dispatch_core(self, core: _Core, t: int) -> bool:
        changed = False
        while True:
            if core.reserved_by is not None:
                return changed
            running = core.running
            if running is not None and running.state in ("spinning", "in_cs_spin"):
                return changed  # non-preemptive busy wait / local section
            best = core.ready[0][3] if core.ready else None
            if running is not None:
                if best is not None and best.task.priority > running.task.priority:
                    running.remaining -= t - running.chunk_start
                    running.epoch += 1
                    self._vacate(core, t)
                    self._emit(t, EventKind.PREEMPT, running.task.id, core.core_id)
                    running.state = "preempted"
                    self._ready_push(running, t)
                    changed = True
                    continue
                return changed
            if best is None or t >= self.horizon:
                return changed
            heapq.heappop(core.ready)
            changed = True
            head = best.head
            if head[0] == "cs" and not best.lock_held:
                self._reach_cs(best, t, on_core=False)
                continue
            self._occupy(core, best, t)
            self._emit(t, EventKind.START, best.task.id, core.core_id)
            if best.lock_held and not best.cs_started:
                # granted mutex section begins its first run on this core
                self._start_local_cs(best, t)
                continue
            if best.lock_held:
                best.state = "running_cs"  # resuming a preempted section
            else:
                best.state = "running"
            best.chunk_start = t
            best.epoch += 1
            self._push(t + best.remaining, _RANK_EXEC_DONE, best,
                       ("exec_done", best, best.epoch))
            return changed

    def _settle(self, t: int):
        while True:
            changed = False
            for cid in sorted(self.cores):
                changed |= self._dispatch_core(self.cores[cid], t)
            changed |= self._grant_sync(t)
            changed |= self._grant_spin(t)
            changed |= self._grant_mutex(t)
            if not changed:
                return

    # -- main loop -----------------------------------------------------------

    def run(self) -> Trace:
        for task in sorted(self.ts.tasks, key=lambda x: x.id):
            self._push(0, _RANK_RELEASE, task, ("release", task))

        while self.heap:
            t = self.heap[0][0]
            if t > self.horizon:
                break
            batch = []
            while self.heap and self.heap[0][0] == t:
                batch.append(heapq.heappop(self.heap))
            for _, _, _, _, payload in batch:
                kind = payload[0]
                if kind == "release":
                    self._release(payload[1], t)
                elif kind == "exec_done":
                    self._on_exec_done(payload[1], payload[2], t)
                elif kind == "cs_arrive":
                    self._sync_enqueue(payload[1], t)
                elif kind == "cs_done":
                    self._on_cs_done(payload[1], t)
                elif kind == "return_done":
                    self._on_return(payload[1], t)
            self._settle(t)

        # teardown: clip accounting to the horizon and flag unfinished jobs
        H = self.horizon
        for core in self.cores.values():
            if core.running is not None:
                self._vacate(core, H)
            self._unreserve(core, H)
        jobs = []
        for task_id in sorted(self._jobs_open):
            for job in self._jobs_open[task_id]:
                jobs.append(JobRecord(task=job.task.id, release=job.release,
                                      finish=job.finish))
        self.trace.jobs = jobs
        usage = {}
        for cid, core in self.cores.items():
            usage[cid] = CoreUsage(busy=core.busy, reserved=core.reserved,
                                   idle=H - core.busy - core.reserved)
        for scid in self.sync_cores:
            busy = self.sync_busy[scid]
            usage[scid] = CoreUsage(busy=busy, reserved=0, idle=H - busy)
        self.trace.core_usage = usage
        return self.trace


def simulate(ts: TaskSet, params: SimParams) -> Trace:
    """Simulate ``ts`` under ``params``; deterministic for identical inputs."""
    expanded = expand_group_locks(ts)
    validate_taskset(expanded)
    require_flat(expanded, "the simulator")
    return _Engine(expanded, params).run()
