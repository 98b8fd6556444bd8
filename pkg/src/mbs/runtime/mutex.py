"""Mutexes whose critical sections run on a dedicated synchronization core.

Two migration mechanisms implement the same contract:

* ``DELEGATION`` (default for :meth:`MbsMutex.critical`): the critical
  section is shipped as a closure to the executor pinned on the core.
* ``AFFINITY`` (always used by :meth:`MbsMutex.lock`): the calling thread is
  re-bound to the core via OS affinity once the admission queue grants it,
  and re-bound back on unlock.

With ``reservation=True`` the origin core is kept occupied for the whole
critical section: a delegating caller spin-waits pinned in place, and an
affinity caller leaves a spinner thread behind.
"""

from __future__ import annotations

import threading
import time
from enum import Enum
from typing import Any, Callable, Optional

from ..cpu import allowed_cpus, current_cpu, pin_current_thread
from ..errors import MutexPoisonedError, UsageError
from .sync_core import CoreState, SyncCore, _nesting_stack, check_nesting


class MigrationMechanism(Enum):
    DELEGATION = "delegation"
    AFFINITY = "affinity"


class LockGuard:
    """Held-lock context for an affinity-migrated critical section."""

    def __init__(self, mutex: "MbsMutex", request, origin_cpu: int,
                 saved_mask: frozenset[int]):
        self.mutex = mutex
        self.origin_cpu = origin_cpu
        self._request = request
        self._saved_mask = saved_mask

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None:
            self.mutex._poison(exc)
        self.mutex.unlock()
        return False


class _ReservationSpinner:
    """Reusable helper thread that occupies a CPU while its owner is migrated."""

    def __init__(self):
        self._go = threading.Event()
        self._stop = threading.Event()
        self._parked = threading.Event()
        self._parked.set()
        self._cpu = 0
        self._thread = threading.Thread(
            target=self._run, name="mbs-reservation-spinner", daemon=True
        )
        self._thread.start()

    def _run(self):
        while True:
            self._go.wait()
            self._go.clear()
            self._parked.clear()
            try:
                pin_current_thread({self._cpu})
            except Exception:
                pass  # best effort; reservation degrades to a parked thread
            while not self._stop.is_set():
                time.sleep(0)  # stay runnable on the reserved core
            self._stop.clear()
            self._parked.set()

    def occupy(self, cpu: int):
        self._parked.wait()
        self._cpu = cpu
        self._go.set()

    def release(self):
        self._stop.set()
        self._parked.wait()


class MbsMutex:
    """A lock whose critical sections execute on one synchronization core."""

    def __init__(self, sync_core: SyncCore, reservation: bool = False, *,
                 mechanism: MigrationMechanism = MigrationMechanism.DELEGATION):
        if sync_core.state is not CoreState.RUNNING:
            raise UsageError("sync core is shut down")
        self.sync_core = sync_core
        self.reservation = reservation
        self.mechanism = mechanism
        self._holder: Optional[int] = None
        self._holder_lock = threading.Lock()
        self._poisoned: Optional[BaseException] = None
        self._guards: dict[int, LockGuard] = {}
        self._spinner: Optional[_ReservationSpinner] = None
        self._spinner_lock = threading.Lock()

    # -- state -------------------------------------------------------------

    @property
    def holder(self) -> Optional[int]:
        """Thread ident of the current holder, or None."""
        return self._holder

    @property
    def poisoned(self) -> bool:
        return self._poisoned is not None

    def _poison(self, exc: BaseException):
        self._poisoned = exc

    def _check_entry(self):
        if self._poisoned is not None:
            raise MutexPoisonedError(self._poisoned)
        if self.sync_core.state is not CoreState.RUNNING:
            raise UsageError("sync core is shut down")
        if self._holder == threading.get_ident():
            raise UsageError("mutex is not reentrant: already held by this thread")

    # -- delegation path -----------------------------------------------------

    def critical(self, work: Callable[[], Any], priority: int = 0):
        """Run ``work`` exactly once on the synchronization core; return its result.

        Equivalent to a lock/work/unlock bracket.  A raise inside ``work``
        poisons the mutex and propagates to this caller.
        """
        if self.mechanism is MigrationMechanism.AFFINITY:
            with self.lock(priority):
                return work()
        return self._critical_delegate(work, priority)

    def _critical_delegate(self, work, priority):
        self._check_entry()
        requester = threading.get_ident()

        def bracketed():
            with self._holder_lock:
                if self._holder is not None:
                    raise UsageError("mutual exclusion violated: concurrent holders")
                self._holder = requester
            try:
                return work()
            finally:
                self._holder = None

        if not self.reservation:
            completion = self.sync_core.submit(bracketed, priority)
            return self._finish(completion, spin=False)

        # Reservation: stay pinned on the origin core and spin until done, so
        # the core is never surrendered and execution resumes exactly there.
        origin = current_cpu()
        saved = pin_current_thread({origin})
        try:
            completion = self.sync_core.submit(bracketed, priority)
            return self._finish(completion, spin=True)
        finally:
            pin_current_thread(saved)

    def _finish(self, completion, spin):
        try:
            return completion.wait(spin=spin)
        except UsageError:
            raise
        except BaseException as exc:
            self._poison(exc)
            raise

    # -- affinity path -------------------------------------------------------

    def lock(self, priority: int = 0) -> LockGuard:
        """Migrate the calling thread onto the synchronization core and hold it."""
        self._check_entry()
        check_nesting(self.sync_core)
        origin = current_cpu()
        saved = allowed_cpus()

        spinner = None
        if self.reservation:
            spinner = self._reservation_spinner()
            spinner.occupy(origin)

        try:
            req = self.sync_core._grant_affinity(priority)
        except BaseException:
            if spinner is not None:
                spinner.release()
            raise
        req.granted.wait()
        try:
            pin_current_thread({self.sync_core.core_id})
        except BaseException:
            req.released.set()
            if spinner is not None:
                spinner.release()
            raise
        self._holder = threading.get_ident()
        _nesting_stack().append(self.sync_core)
        guard = LockGuard(self, req, origin, saved)
        self._guards[threading.get_ident()] = guard
        return guard

    def unlock(self):
        """Release the mutex and migrate back toward the origin core."""
        ident = threading.get_ident()
        if self._holder != ident:
            raise UsageError("unlock by a thread that does not hold the mutex")
        guard = self._guards.pop(ident)
        self._holder = None
        stack = _nesting_stack()
        if stack and stack[-1] is self.sync_core:
            stack.pop()
        if self.reservation and self._spinner is not None:
            self._spinner.release()
        # Land on the origin core first, then restore the original mask, so
        # execution resumes there (exactly, for reservation; preferred, else).
        pin_current_thread({guard.origin_cpu})
        pin_current_thread(guard._saved_mask)
        guard._request.released.set()

    def _reservation_spinner(self) -> _ReservationSpinner:
        with self._spinner_lock:
            if self._spinner is None:
                self._spinner = _ReservationSpinner()
            return self._spinner
