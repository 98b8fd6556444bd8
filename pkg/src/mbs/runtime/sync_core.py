"""Dedicated synchronization-core executors.

A :class:`SyncCore` owns one executor thread pinned to a physical CPU.  The
executor serves critical-section requests strictly one at a time, in the
order defined by the admission policy, and never runs anything else.  Two
request flavors exist: delegated closures (the executor runs the work) and
affinity grants (the executor parks while a migrated application thread runs
on the core, resuming admission when that thread releases).
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from enum import Enum
from typing import Any, Callable, Optional

from ..cpu import machine_cpu_count, pin_current_thread
from ..errors import ConfigurationError, PlatformError, UsageError


class AdmissionPolicy(Enum):
    """Order in which queued critical-section requests are granted."""

    PRIORITY = "priority"  # larger priority first, FIFO among equals
    FIFO = "fifo"


class CoreState(Enum):
    RUNNING = "running"
    SHUT_DOWN = "shut_down"


class Completion:
    """Outcome slot for a delegated critical section.

    ``finished`` is a plain attribute so reservation-holding callers can spin
    on it without blocking; parked callers wait on the event instead.
    """

    __slots__ = ("finished", "result", "error", "_event")

    def __init__(self):
        self.finished = False
        self.result = None
        self.error: Optional[BaseException] = None
        self._event = threading.Event()

    def _complete(self, result=None, error=None):
        self.result = result
        self.error = error
        self.finished = True
        self._event.set()

    def wait(self, *, spin: bool = False):
        """Block (or busy-yield when ``spin``) until the work ran; re-raise its error."""
        if spin:
            while not self.finished:
                time.sleep(0)
        else:
            self._event.wait()
        if self.error is not None:
            raise self.error
        return self.result


class CsRequest:
    """One queued critical-section request."""

    __slots__ = (
        "priority",
        "seqno",
        "requester_id",
        "enqueue_time",
        "work",
        "completion",
        "granted",
        "released",
    )

    def __init__(self, priority, seqno, requester_id, work, completion,
                 granted=None, released=None):
        self.priority = priority
        self.seqno = seqno
        self.requester_id = requester_id
        self.enqueue_time = time.monotonic_ns()
        self.work = work                # delegated closure, None for affinity grants
        self.completion = completion    # delegation only
        self.granted = granted          # affinity only
        self.released = released        # affinity only


# One executor per physical core per process.
_claimed_cores: dict[int, "SyncCore"] = {}
_claim_lock = threading.Lock()

# Stack of SyncCores whose critical sections the current thread is inside,
# used to enforce the static nesting order across cores.
_nesting = threading.local()


def _nesting_stack() -> list:
    stack = getattr(_nesting, "stack", None)
    if stack is None:
        stack = []
        _nesting.stack = stack
    return stack


def check_nesting(target: "SyncCore"):
    stack = _nesting_stack()
    if stack:
        inner = stack[-1]
        if inner.nesting_rank >= target.nesting_rank:
            raise UsageError(
                f"nested critical section toward core {target.core_id} "
                f"(rank {target.nesting_rank}) from inside core {inner.core_id} "
                f"(rank {inner.nesting_rank}); nesting must follow strictly "
                "increasing ranks"
            )


class SyncCore:
    """A processor core dedicated to running critical sections.

    Parameters
    ----------
    core_id:
        Physical CPU to pin the executor to.  Must exist, be in the allowed
        affinity mask, and not be claimed by another SyncCore in this process.
    policy:
        Admission order for concurrent requests.
    park_on_idle:
        Executor blocks on a condition while idle instead of busy-yielding.
    nesting_rank:
        Position in the static total order used to validate nested critical
        sections; defaults to ``core_id``.
    """

    def __init__(self, core_id: int, policy: AdmissionPolicy = AdmissionPolicy.PRIORITY,
                 *, park_on_idle: bool = False, nesting_rank: int | None = None):
        if not isinstance(core_id, int) or isinstance(core_id, bool):
            raise ConfigurationError(f"core_id must be an int, got {core_id!r}")
        if not 0 <= core_id < machine_cpu_count():
            raise ConfigurationError(
                f"core_id {core_id} out of range for a {machine_cpu_count()}-CPU machine"
            )
        if not isinstance(policy, AdmissionPolicy):
            raise ConfigurationError(f"policy must be an AdmissionPolicy, got {policy!r}")

        self.core_id = core_id
        self.policy = policy
        self.park_on_idle = park_on_idle
        self.nesting_rank = core_id if nesting_rank is None else nesting_rank

        self._lock = threading.Lock()
        self._cond = threading.Condition(self._lock)
        self._heap: list[tuple] = []
        self._seq = itertools.count()
        self._state = CoreState.RUNNING
        self._draining = False
        self._in_service = 0
        self._served = 0

        with _claim_lock:
            owner = _claimed_cores.get(core_id)
            if owner is not None:
                raise UsageError(f"core {core_id} is already claimed by another SyncCore")
            _claimed_cores[core_id] = self

        self._startup_error: Optional[BaseException] = None
        self._ready = threading.Event()
        self._thread = threading.Thread(
            target=self._run, name=f"mbs-sync-core-{core_id}", daemon=True
        )
        self._thread.start()
        self._ready.wait()
        if self._startup_error is not None:
            with _claim_lock:
                _claimed_cores.pop(core_id, None)
            with self._lock:
                self._state = CoreState.SHUT_DOWN
            raise self._startup_error

    # -- introspection ----------------------------------------------------

    @property
    def state(self) -> CoreState:
        return self._state

    @property
    def queue_len(self) -> int:
        with self._lock:
            return len(self._heap)

    @property
    def served_count(self) -> int:
        return self._served

    def _key(self, priority: int, seqno: int) -> tuple:
        if self.policy is AdmissionPolicy.PRIORITY:
            return (-priority, seqno)
        return (seqno,)

    # -- request submission ------------------------------------------------

    def submit(self, work: Callable[[], Any], priority: int = 0) -> Completion:
        """Queue a closure for execution on this core; returns immediately."""
        check_nesting(self)
        completion = Completion()
        req = CsRequest(priority, 0, threading.get_ident(), work, completion)
        self._enqueue(req)
        return completion

    def _enqueue(self, req: CsRequest):
        with self._lock:
            if self._state is not CoreState.RUNNING or self._draining:
                raise UsageError(f"core {self.core_id} is shut down")
            req.seqno = next(self._seq)
            heapq.heappush(self._heap, (self._key(req.priority, req.seqno), req.seqno, req))
            self._cond.notify()

    def _grant_affinity(self, priority: int) -> CsRequest:
        """Queue an affinity-migration request; returns once the grant is queued."""
        check_nesting(self)
        req = CsRequest(priority, 0, threading.get_ident(), None, None,
                        granted=threading.Event(), released=threading.Event())
        self._enqueue(req)
        return req

    # -- executor ----------------------------------------------------------

    def _run(self):
        try:
            pin_current_thread({self.core_id})
        except PlatformError as exc:
            self._startup_error = exc
            self._ready.set()
            return
        self._ready.set()
        while True:
            req = self._next_request()
            if req is None:
                return
            self._serve(req)

    def _next_request(self) -> Optional[CsRequest]:
        if self.park_on_idle:
            with self._lock:
                while True:
                    if self._heap:
                        self._in_service += 1
                        return heapq.heappop(self._heap)[-1]
                    if self._state is not CoreState.RUNNING:
                        return None
                    self._cond.wait()
        # Busy-wait mode: lowest admission latency, burns the core while idle.
        while True:
            with self._lock:
                if self._heap:
                    self._in_service += 1
                    return heapq.heappop(self._heap)[-1]
                if self._state is not CoreState.RUNNING:
                    return None
            time.sleep(0)

    def _serve(self, req: CsRequest):
        try:
            if req.work is not None:
                stack = _nesting_stack()
                stack.append(self)
                try:
                    result = req.work()
                except BaseException as exc:  # reported to the requester, not here
                    req.completion._complete(error=exc)
                else:
                    req.completion._complete(result=result)
                finally:
                    stack.pop()
            else:
                # Affinity grant: the requester migrates onto this core and
                # runs there; admission stays blocked until it releases.
                req.granted.set()
                req.released.wait()
        finally:
            with self._lock:
                self._in_service -= 1
                self._served += 1
                self._cond.notify_all()

    # -- shutdown ----------------------------------------------------------

    def shutdown(self, drain: bool = False):
        """Stop the executor.

        Without ``drain`` the queue must be empty and nothing may be in
        service; with ``drain`` every queued request is served first.
        """
        with self._lock:
            if self._state is not CoreState.RUNNING:
                return
            if not drain and (self._heap or self._in_service):
                raise UsageError(
                    f"core {self.core_id} still has queued or running critical "
                    "sections; pass drain=True to serve them first"
                )
            self._draining = drain
            if drain:
                while self._heap or self._in_service:
                    self._cond.wait()
            self._state = CoreState.SHUT_DOWN
            self._cond.notify_all()
        self._thread.join()
        with _claim_lock:
            if _claimed_cores.get(self.core_id) is self:
                del _claimed_cores[self.core_id]
