"""Latency samples, order statistics, and the sample CSV format."""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from math import ceil
from typing import Iterable, Optional, Sequence

from ..errors import UsageError

CSV_HEADER = ["variant", "thread", "cycle_index", "cycle_ns", "cs_ns",
              "shared_cache_accesses"]


@dataclass(frozen=True, slots=True)
class LatencySample:
    cycle_ns: int
    cs_ns: int
    shared_cache_accesses: Optional[int] = None


@dataclass(frozen=True, slots=True)
class LatencyStats:
    count: int
    min: int
    p50: int
    p99: int
    max: int
    mean: float
    stddev: float
    histogram: tuple[tuple[int, int], ...]  # (bucket lower bound, count)


def _nearest_rank(values: Sequence[int], q: float) -> int:
    # values sorted ascending; nearest-rank percentile (1-based rank ceil(q*n))
    rank = max(1, ceil(q * len(values)))
    return values[rank - 1]


def _log_bucket(v: int) -> int:
    return 0 if v <= 0 else 1 << (v.bit_length() - 1)


def _histogram(values: Sequence[int]) -> tuple[tuple[int, int], ...]:
    counts: dict[int, int] = {}
    for v in values:
        b = _log_bucket(v)
        counts[b] = counts.get(b, 0) + 1
    lo, hi = _log_bucket(values[0]), _log_bucket(values[-1])
    buckets = []
    b = lo
    while True:
        buckets.append((b, counts.get(b, 0)))
        if b >= hi:
            break
        b = 1 if b == 0 else b * 2
    return tuple(buckets)


def compute_stats(samples: Iterable[LatencySample], field: str = "cycle") -> LatencyStats:
    """Exact order statistics over one latency field ("cycle" or "cs")."""
    if field == "cycle":
        values = sorted(s.cycle_ns for s in samples)
    elif field == "cs":
        values = sorted(s.cs_ns for s in samples)
    else:
        raise UsageError(f"unknown stats field {field!r}; expected 'cycle' or 'cs'")
    if not values:
        raise UsageError("cannot compute statistics of an empty sample list")
    return LatencyStats(
        count=len(values),
        min=values[0],
        p50=_nearest_rank(values, 0.50),
        p99=_nearest_rank(values, 0.99),
        max=values[-1],
        mean=statistics.fmean(values),
        stddev=statistics.pstdev(values),
        histogram=_histogram(values),
    )


def write_samples_csv(f, variant: str, samples_by_thread: Sequence[Sequence[LatencySample]]):
    """One row per sample; the counter cell is empty when counters were off."""
    w = csv.writer(f)
    w.writerow(CSV_HEADER)
    for tid, samples in enumerate(samples_by_thread):
        for idx, s in enumerate(samples):
            counter = "" if s.shared_cache_accesses is None else s.shared_cache_accesses
            w.writerow([variant, tid, idx, s.cycle_ns, s.cs_ns, counter])


def format_stats_table(rows: Sequence[tuple[str, LatencyStats]]) -> str:
    """Aligned text table for terminal reporting; one row per (label, stats)."""
    header = ["metric", "count", "min", "p50", "p99", "max", "mean", "stddev"]
    table = [header]
    for label, st in rows:
        table.append([label, str(st.count), str(st.min), str(st.p50), str(st.p99),
                      str(st.max), f"{st.mean:.1f}", f"{st.stddev:.1f}"])
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines)
