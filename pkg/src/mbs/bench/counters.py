"""Per-thread hardware counter access via perf_event_open(2).

Counters bracket a code region on whichever thread executes it; handles are
opened lazily per OS thread.  When the facility is missing or forbidden the
provider raises :class:`CapabilityError` and the benchmark carries on
latency-only.
"""

from __future__ import annotations

import ctypes
import os
import platform
import struct
import threading

from ..errors import CapabilityError

_PERF_TYPE_HARDWARE = 0
_PERF_TYPE_HW_CACHE = 3

_HW_CACHE_L1D = 0
_HW_CACHE_LL = 2
_OP_READ = 0
_RESULT_ACCESS = 0
_RESULT_MISS = 1


def _hw_cache_config(cache: int, op: int, result: int) -> int:
    return cache | (op << 8) | (result << 16)


# name -> (perf type, config); LL = last-level/shared cache
EVENTS = {
    "ll-access": (_PERF_TYPE_HW_CACHE, _hw_cache_config(_HW_CACHE_LL, _OP_READ, _RESULT_ACCESS)),
    "ll-miss": (_PERF_TYPE_HW_CACHE, _hw_cache_config(_HW_CACHE_LL, _OP_READ, _RESULT_MISS)),
    "l1d-access": (_PERF_TYPE_HW_CACHE, _hw_cache_config(_HW_CACHE_L1D, _OP_READ, _RESULT_ACCESS)),
    "l1d-miss": (_PERF_TYPE_HW_CACHE, _hw_cache_config(_HW_CACHE_L1D, _OP_READ, _RESULT_MISS)),
    "cache-references": (_PERF_TYPE_HARDWARE, 2),
    "cache-misses": (_PERF_TYPE_HARDWARE, 3),
}

_SYSCALL_NR = {"x86_64": 298, "aarch64": 241, "arm64": 241, "riscv64": 241}

_ATTR_SIZE = 128
_EXCLUDE_KERNEL_HV = (1 << 5) | (1 << 6)  # flag bits in perf_event_attr


def _open_fd(perf_type: int, config: int) -> int:
    nr = _SYSCALL_NR.get(platform.machine())
    if nr is None:
        raise CapabilityError(f"perf_event_open unsupported on {platform.machine()}")
    try:
        libc = ctypes.CDLL(None, use_errno=True)
    except OSError as exc:
        raise CapabilityError(f"libc unavailable: {exc}") from exc
    attr = struct.pack(
        "IIQQQQ", perf_type, _ATTR_SIZE, config, 0, 0, _EXCLUDE_KERNEL_HV
    ) + b"\x00" * (_ATTR_SIZE - 40)
    buf = ctypes.create_string_buffer(attr, _ATTR_SIZE)
    fd = libc.syscall(nr, buf, 0, -1, -1, 0)  # this thread, any CPU
    if fd < 0:
        err = ctypes.get_errno()
        raise CapabilityError(
            f"perf_event_open failed (errno {err}: {os.strerror(err)})"
        )
    return fd


class CounterHandle:
    """An open counter bound to one OS thread."""

    def __init__(self, fd: int):
        self._fd = fd

    def read(self) -> int:
        return int.from_bytes(os.read(self._fd, 8), "little")

    def close(self):
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1


class PerfCounterProvider:
    """Opens one counter per thread for the configured event.

    Construction probes the facility on the calling thread and raises
    :class:`CapabilityError` when it is unavailable.
    """

    def __init__(self, event: str = "ll-access"):
        if event not in EVENTS:
            raise CapabilityError(
                f"unknown counter event {event!r}; choices: {', '.join(sorted(EVENTS))}"
            )
        self.event = event
        self._type, self._config = EVENTS[event]
        self._local = threading.local()
        os.close(_open_fd(self._type, self._config))  # probe only

    def local(self) -> CounterHandle:
        handle = getattr(self._local, "handle", None)
        if handle is None:
            handle = CounterHandle(_open_fd(self._type, self._config))
            self._local.handle = handle
        return handle

    def bracket(self):
        """Read the thread-local counter; call the result again for the delta."""
        handle = self.local()
        start = handle.read()
        return lambda: handle.read() - start
