"""Deterministic scheduler simulation with pluggable synchronization."""

from .cache import CacheState
from .engine import AdmissionOrder, SimParams, SimProtocol, simulate
from .generator import DEFAULT_PERIOD_POOL, generate_taskset, uunifast
from .trace import (
    CoreUsage,
    CsServiceRecord,
    EventKind,
    JobRecord,
    ObservedResponse,
    SimEvent,
    Trace,
    observed_response_times,
    write_summary_csv,
    write_trace_csv,
)

__all__ = [
    "AdmissionOrder",
    "CacheState",
    "CoreUsage",
    "CsServiceRecord",
    "DEFAULT_PERIOD_POOL",
    "EventKind",
    "JobRecord",
    "ObservedResponse",
    "SimEvent",
    "SimParams",
    "SimProtocol",
    "Trace",
    "generate_taskset",
    "observed_response_times",
    "simulate",
    "uunifast",
    "write_summary_csv",
    "write_trace_csv",
]
