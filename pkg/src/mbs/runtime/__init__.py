"""Migration-based synchronization runtime: sync cores, mutexes, baselines."""

from .baseline import FifoMutex, LockKind, TicketSpinLock, make_baseline_lock
from .mutex import LockGuard, MbsMutex, MigrationMechanism
from .sync_core import AdmissionPolicy, Completion, CoreState, SyncCore

__all__ = [
    "AdmissionPolicy",
    "Completion",
    "CoreState",
    "FifoMutex",
    "LockGuard",
    "LockKind",
    "MbsMutex",
    "MigrationMechanism",
    "SyncCore",
    "TicketSpinLock",
    "make_baseline_lock",
]
