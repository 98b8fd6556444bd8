"""User-space baseline locks with FIFO acquisition order.

``TicketSpinLock`` busy-waits (ticket discipline); ``FifoMutex`` suspends
waiters and hands the lock over in strict queue order.  Both expose the same
acquire/release contract as :class:`~mbs.runtime.mutex.MbsMutex` critical
sections: mutual exclusion, non-reentrant, release by non-holder is an error.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from enum import Enum

from ..errors import UsageError


class LockKind(Enum):
    SPINLOCK = "spinlock"
    MUTEX = "mutex"


class TicketSpinLock:
    """FIFO spinlock: draw a ticket, busy-yield until it is served."""

    def __init__(self):
        self._draw = threading.Lock()
        self._next_ticket = 0
        self._now_serving = 0
        self._holder = None

    def acquire(self):
        ident = threading.get_ident()
        if self._holder == ident:
            raise UsageError("spinlock is not reentrant: already held by this thread")
        with self._draw:
            ticket = self._next_ticket
            self._next_ticket += 1
        while self._now_serving != ticket:
            time.sleep(0)
        self._holder = ident

    def release(self):
        if self._holder != threading.get_ident():
            raise UsageError("release by a thread that does not hold the spinlock")
        self._holder = None
        self._now_serving += 1  # sole holder writes; readers race benignly

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, *exc):
        self.release()
        return False


class FifoMutex:
    """Suspending mutex granting the lock in strict FIFO order (direct handoff)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._waiters: deque[tuple[int, threading.Event]] = deque()
        self._holder = None

    def acquire(self):
        ident = threading.get_ident()
        gate = None
        with self._lock:
            if self._holder == ident:
                raise UsageError("mutex is not reentrant: already held by this thread")
            if self._holder is None and not self._waiters:
                self._holder = ident
                return
            gate = threading.Event()
            self._waiters.append((ident, gate))
        gate.wait()

    def release(self):
        ident = threading.get_ident()
        with self._lock:
            if self._holder != ident:
                raise UsageError("release by a thread that does not hold the mutex")
            if self._waiters:
                next_ident, gate = self._waiters.popleft()
                self._holder = next_ident
                gate.set()
            else:
                self._holder = None

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, *exc):
        self.release()
        return False


def make_baseline_lock(kind: LockKind):
    if kind is LockKind.SPINLOCK:
        return TicketSpinLock()
    if kind is LockKind.MUTEX:
        return FifoMutex()
    raise ValueError(f"unknown lock kind {kind!r}")
