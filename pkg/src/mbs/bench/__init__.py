"""Lock microbenchmarks: private/shared buffer walks under each variant."""

from .config import DEFAULT_THREADS, SIZE_CLASSES, BenchConfig, Variant, resolve_size
from .counters import EVENTS, CounterHandle, PerfCounterProvider
from .harness import BenchResult, aligned_zeros, run_benchmark
from .stats import (
    CSV_HEADER,
    LatencySample,
    LatencyStats,
    compute_stats,
    format_stats_table,
    write_samples_csv,
)

__all__ = [
    "BenchConfig",
    "BenchResult",
    "CSV_HEADER",
    "CounterHandle",
    "DEFAULT_THREADS",
    "EVENTS",
    "LatencySample",
    "LatencyStats",
    "PerfCounterProvider",
    "SIZE_CLASSES",
    "Variant",
    "aligned_zeros",
    "compute_stats",
    "format_stats_table",
    "resolve_size",
    "run_benchmark",
    "write_samples_csv",
]
