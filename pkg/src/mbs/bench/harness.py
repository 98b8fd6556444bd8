"""The benchmark harness: pinned worker threads, buffers, and timing.

All variants run the identical buffer-touch sequence per cycle; only the
synchronization mechanism around the shared walk differs.  Cycle latency is
clocked immediately before lock and after unlock, critical-section latency
at the first/last shared access inside the lock, so admission queueing never
pollutes cs_ns.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cpu import allowed_cpus, pick_sync_core, pin_current_thread
from ..errors import CapabilityError, PlatformError
from ..runtime import (
    AdmissionPolicy,
    FifoMutex,
    MbsMutex,
    SyncCore,
    TicketSpinLock,
)
from .config import BenchConfig, Variant
from .counters import PerfCounterProvider
from .stats import LatencySample


@dataclass
class BenchResult:
    config: BenchConfig
    samples: list[list[LatencySample]]
    counters_active: bool
    warnings: list[str] = field(default_factory=list)
    shared_line_values: list[int] = field(default_factory=list)
    executed_cycles_per_thread: list[int] = field(default_factory=list)
    touch_trace: Optional[list] = None  # per thread, per cycle: (local, shared) index tuples
    sync_core_id: Optional[int] = None
    app_cores: list[int] = field(default_factory=list)


def aligned_zeros(n_words: int, align_bytes: int = 64) -> np.ndarray:
    """int64 zeros whose first element sits on an ``align_bytes`` boundary."""
    if n_words == 0:
        return np.zeros(0, dtype=np.int64)
    pad = align_bytes // 8
    raw = np.zeros(n_words + pad, dtype=np.int64)
    off = (-raw.ctypes.data) % align_bytes // 8
    return raw[off:off + n_words]


def _plan_cores(cfg: BenchConfig):
    """Pick the sync core (for migrating variants) and the app-core rotation."""
    allowed = sorted(allowed_cpus())
    if cfg.variant in (Variant.MBS, Variant.MBS_R):
        sync = cfg.sync_core if cfg.sync_core is not None else pick_sync_core()
        app = [c for c in allowed if c != sync]
        if not app:
            raise PlatformError(
                "insufficient cores: a migrating variant needs at least one "
                "application core distinct from the synchronization core"
            )
        return sync, app
    return None, allowed


def run_benchmark(cfg: BenchConfig) -> BenchResult:
    """Run one benchmark configuration; returns every sample, none dropped."""
    sync_core_id, app_cores = _plan_cores(cfg)
    warnings: list[str] = []

    provider = None
    if cfg.counters_enabled:
        try:
            provider = PerfCounterProvider(cfg.counter_event)
        except CapabilityError as exc:
            warnings.append(f"counters disabled: {exc}")

    wpl = cfg.cache_line_bytes // 8
    shared = aligned_zeros(cfg.sigma_lines * wpl, cfg.cache_line_bytes)
    shared_stride = shared[::wpl]

    mbs_core = None
    lock = None
    if cfg.variant in (Variant.MBS, Variant.MBS_R):
        mbs_core = SyncCore(sync_core_id, AdmissionPolicy.PRIORITY,
                            park_on_idle=cfg.park_on_idle)
        lock = MbsMutex(mbs_core, reservation=(cfg.variant is Variant.MBS_R))
    elif cfg.variant is Variant.SPINLOCK:
        lock = TicketSpinLock()
    else:
        lock = FifoMutex()

    total_cycles = cfg.warmup_cycles + cfg.cycles
    samples: list[list[LatencySample]] = [[] for _ in range(cfg.threads)]
    traces: list[list] = [[] for _ in range(cfg.threads)] if cfg.trace_lines else []
    errors: list[BaseException] = []
    start_gate = threading.Event()

    def worker(tid: int):
        try:
            if cfg.pin_threads:
                pin_current_thread({app_cores[tid % len(app_cores)]})
            local = aligned_zeros(cfg.lambda_lines * wpl, cfg.cache_line_bytes)
            local_stride = local[::wpl] if cfg.lambda_lines else None
            out = samples[tid]
            cs_window = [0, 0, None]  # t0, t1, counter delta

            def shared_walk():
                delta_fn = provider.bracket() if provider is not None else None
                t0 = time.perf_counter_ns()
                np.add(shared_stride, 1, out=shared_stride)
                t1 = time.perf_counter_ns()
                cs_window[0] = t0
                cs_window[1] = t1
                cs_window[2] = delta_fn() if delta_fn is not None else None

            start_gate.wait()
            for k in range(total_cycles):
                if cfg.trace_lines:
                    traces[tid].append((tuple(range(cfg.lambda_lines)),
                                        tuple(range(cfg.sigma_lines))))
                if local_stride is not None:
                    np.add(local_stride, 1, out=local_stride)
                t_pre = time.perf_counter_ns()
                if isinstance(lock, MbsMutex):
                    lock.critical(shared_walk)
                else:
                    lock.acquire()
                    try:
                        shared_walk()
                    finally:
                        lock.release()
                t_post = time.perf_counter_ns()
                if k >= cfg.warmup_cycles:
                    out.append(LatencySample(
                        cycle_ns=t_post - t_pre,
                        cs_ns=cs_window[1] - cs_window[0],
                        shared_cache_accesses=cs_window[2],
                    ))
        except BaseException as exc:
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(i,), name=f"mbs-bench-{i}")
               for i in range(cfg.threads)]
    for t in threads:
        t.start()
    start_gate.set()
    for t in threads:
        t.join()
    if mbs_core is not None:
        mbs_core.shutdown(drain=True)
    if errors:
        raise errors[0]

    return BenchResult(
        config=cfg,
        samples=samples,
        counters_active=provider is not None,
        warnings=warnings,
        shared_line_values=[int(v) for v in shared_stride],
        executed_cycles_per_thread=[total_cycles] * cfg.threads,
        touch_trace=traces if cfg.trace_lines else None,
        sync_core_id=sync_core_id,
        app_cores=list(app_cores),
    )
