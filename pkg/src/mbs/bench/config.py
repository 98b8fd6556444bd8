"""Microbenchmark configuration.

Each benchmark cycle walks a thread-private buffer of ``lambda_bytes``
(unsynchronized) and, inside one critical section under the selected
variant's lock, a shared buffer of ``sigma_bytes``; both walks write one
word per cache line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import ceil

from ..cpu import CACHE_LINE_BYTES, l1d_size_bytes
from ..errors import ConfigurationError


class Variant(Enum):
    MBS = "mbs"
    MBS_R = "mbs-r"
    SPINLOCK = "spinlock"
    MUTEX = "mutex"


# Application thread counts used in the reference experiments: the variant
# with origin-core reservation runs one thread fewer.
DEFAULT_THREADS = {
    Variant.MBS: 4,
    Variant.MBS_R: 3,
    Variant.SPINLOCK: 4,
    Variant.MUTEX: 4,
}

SIZE_CLASSES = {"small": 0.25, "fit": 1.0, "large": 4.0}


def resolve_size(spec: str | int, l1_bytes: int | None = None) -> int:
    """Accept raw byte counts or the size classes small/fit/large (vs L1d)."""
    if isinstance(spec, int):
        return spec
    if spec in SIZE_CLASSES:
        l1 = l1d_size_bytes() if l1_bytes is None else l1_bytes
        return int(SIZE_CLASSES[spec] * l1)
    try:
        return int(spec)
    except ValueError:
        raise ConfigurationError(
            f"buffer size {spec!r} is neither bytes nor one of {sorted(SIZE_CLASSES)}"
        ) from None


@dataclass
class BenchConfig:
    variant: Variant
    lambda_bytes: int
    sigma_bytes: int
    cycles: int
    threads: int | None = None           # None -> variant default
    sync_core: int | None = None         # None -> pick (MBS_SYNC_CORES honored)
    cache_line_bytes: int = CACHE_LINE_BYTES
    counters_enabled: bool = False
    counter_event: str = "ll-access"
    keep_warmup: bool = False
    park_on_idle: bool = False
    trace_lines: bool = False
    pin_threads: bool = True

    def __post_init__(self):
        if not isinstance(self.variant, Variant):
            self.variant = Variant(self.variant)
        if self.threads is None:
            self.threads = DEFAULT_THREADS[self.variant]
        if self.cache_line_bytes < 8 or self.cache_line_bytes % 8:
            raise ConfigurationError("cache_line_bytes must be a multiple of 8 words")
        if self.lambda_bytes < 0:
            raise ConfigurationError("lambda_bytes must be >= 0")
        if self.sigma_bytes < self.cache_line_bytes:
            raise ConfigurationError(
                f"sigma_bytes must be >= one cache line ({self.cache_line_bytes})"
            )
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        if self.cycles < 1:
            raise ConfigurationError("cycles must be >= 1")

    @property
    def lambda_lines(self) -> int:
        return ceil(self.lambda_bytes / self.cache_line_bytes)

    @property
    def sigma_lines(self) -> int:
        return ceil(self.sigma_bytes / self.cache_line_bytes)

    @property
    def warmup_cycles(self) -> int:
        # First touches are compulsory misses under implicit pinning; they are
        # executed but not sampled unless explicitly kept.
        if self.keep_warmup:
            return 0
        return max(10, ceil(self.cycles / 100))
