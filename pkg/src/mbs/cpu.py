"""CPU topology, thread pinning, and synchronization-core selection helpers.

Pinning uses the per-thread Linux affinity syscalls exposed through
``os.sched_setaffinity`` (pid 0 targets the calling thread).  The executing
CPU is probed via glibc ``sched_getcpu(3)``, which CPython does not expose.
"""

from __future__ import annotations

import ctypes
import os
import re

from .errors import ConfigurationError, PlatformError

SYNC_CORES_ENV = "MBS_SYNC_CORES"
CACHE_LINE_BYTES = 64
_L1D_FALLBACK = 32 * 1024

try:
    _libc = ctypes.CDLL(None, use_errno=True)
    _libc.sched_getcpu.restype = ctypes.c_int
except (OSError, AttributeError):  # non-glibc platform
    _libc = None


def current_cpu() -> int:
    """Return the CPU the calling thread is executing on right now."""
    if _libc is None:
        raise PlatformError("sched_getcpu() is unavailable on this platform")
    cpu = _libc.sched_getcpu()
    if cpu < 0:
        raise PlatformError("sched_getcpu() failed")
    return cpu


def probing_available() -> bool:
    return _libc is not None


def allowed_cpus() -> frozenset[int]:
    """CPUs the current thread may run on (cgroup/affinity mask)."""
    try:
        return frozenset(os.sched_getaffinity(0))
    except (AttributeError, OSError) as exc:
        raise PlatformError(f"cannot query CPU affinity: {exc}") from exc


def machine_cpu_count() -> int:
    return os.cpu_count() or 1


def pin_current_thread(cpus) -> frozenset[int]:
    """Pin the calling thread to ``cpus``; returns the previous mask."""
    previous = allowed_cpus()
    try:
        os.sched_setaffinity(0, set(cpus))
    except (OSError, ValueError) as exc:
        raise PlatformError(f"affinity pinning to {sorted(cpus)} rejected: {exc}") from exc
    return previous


def sync_core_candidates() -> list[int]:
    """CPU ids eligible as synchronization cores, most preferred first.

    ``MBS_SYNC_CORES`` (comma-separated ids) overrides the default, which is
    the highest-numbered allowed CPU (furthest from core 0 where OS noise
    concentrates).
    """
    raw = os.environ.get(SYNC_CORES_ENV)
    allowed = allowed_cpus()
    if raw is not None:
        ids = []
        for field in raw.split(","):
            field = field.strip()
            if not field:
                continue
            if not re.fullmatch(r"\d+", field):
                raise ConfigurationError(
                    f"{SYNC_CORES_ENV} entry {field!r} is not a CPU id"
                )
            ids.append(int(field))
        if not ids:
            raise ConfigurationError(f"{SYNC_CORES_ENV} is set but lists no CPU ids")
        bad = [i for i in ids if i not in allowed]
        if bad:
            raise ConfigurationError(
                f"{SYNC_CORES_ENV} names CPUs {bad} outside the allowed set {sorted(allowed)}"
            )
        return ids
    return [max(allowed)]


def pick_sync_core() -> int:
    return sync_core_candidates()[0]


def _parse_cache_size(text: str) -> int | None:
    m = re.fullmatch(r"(\d+)([KMG]?)", text.strip())
    if not m:
        return None
    n = int(m.group(1))
    return n * {"": 1, "K": 1024, "M": 1024**2, "G": 1024**3}[m.group(2)]


def l1d_size_bytes() -> int:
    """Detected L1 data cache size of cpu0, falling back to 32 KiB."""
    base = "/sys/devices/system/cpu/cpu0/cache"
    try:
        for entry in sorted(os.listdir(base)):
            if not entry.startswith("index"):
                continue
            path = os.path.join(base, entry)
            try:
                with open(os.path.join(path, "level")) as f:
                    level = f.read().strip()
                with open(os.path.join(path, "type")) as f:
                    kind = f.read().strip()
                if level != "1" or kind not in ("Data", "Unified"):
                    continue
                with open(os.path.join(path, "size")) as f:
                    size = _parse_cache_size(f.read())
                if size:
                    return size
            except OSError:
                continue
    except OSError:
        pass
    return _L1D_FALLBACK
