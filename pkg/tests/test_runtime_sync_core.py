import threading
import time

import pytest

from mbs.errors import ConfigurationError, UsageError
from mbs.runtime import AdmissionPolicy, CoreState, SyncCore


def test_construction_contract(sync_cpu):
    core = SyncCore(sync_cpu, AdmissionPolicy.PRIORITY)
    try:
        assert core.state is CoreState.RUNNING
        assert core.queue_len == 0
        assert core.core_id == sync_cpu
    finally:
        core.shutdown()
    assert core.state is CoreState.SHUT_DOWN


def test_core_id_out_of_range():
    with pytest.raises(ConfigurationError):
        SyncCore(10_000, AdmissionPolicy.FIFO)
    with pytest.raises(ConfigurationError):
        SyncCore(-1)
    with pytest.raises(ConfigurationError):
        SyncCore("zero")  # type: ignore[arg-type]


def test_duplicate_claim_rejected(sync_cpu):
    core = SyncCore(sync_cpu)
    try:
        with pytest.raises(UsageError):
            SyncCore(sync_cpu)
    finally:
        core.shutdown()
    # After shutdown the core id is claimable again.
    again = SyncCore(sync_cpu)
    again.shutdown()


def test_submit_runs_and_returns_result(sync_cpu):
    core = SyncCore(sync_cpu)
    try:
        assert core.submit(lambda: 7).wait() == 7
    finally:
        core.shutdown()


def _staged_service_order(policy, priorities, sync_cpu, park=False):
    """Enqueue requests while the executor is blocked on a gate; return service order."""
    core = SyncCore(sync_cpu, policy, park_on_idle=park)
    served = []
    gate = threading.Event()
    try:
        blocker = core.submit(gate.wait, priority=100)
        # The blocker must be in service before staging, otherwise it would
        # compete with the staged requests for admission order.
        while core.queue_len or not core._in_service:
            time.sleep(0)
        completions = [core.submit((lambda p=p: served.append(p)), priority=p)
                       for p in priorities]
        gate.set()
        blocker.wait()
        for c in completions:
            c.wait()
    finally:
        core.shutdown(drain=True)
    return served


def test_priority_admission_order(sync_cpu):
    assert _staged_service_order(AdmissionPolicy.PRIORITY, [1, 5, 3], sync_cpu) == [5, 3, 1]


def test_fifo_admission_order(sync_cpu):
    assert _staged_service_order(AdmissionPolicy.FIFO, [1, 5, 3], sync_cpu) == [1, 5, 3]


def test_priority_ties_broken_fifo(sync_cpu):
    assert _staged_service_order(
        AdmissionPolicy.PRIORITY, [2, 2, 2], sync_cpu
    ) == [2, 2, 2]  # identical priorities keep enqueue order


def test_park_on_idle_mode_serves(sync_cpu):
    order = _staged_service_order(AdmissionPolicy.PRIORITY, [1, 5, 3], sync_cpu, park=True)
    assert order == [5, 3, 1]


def test_shutdown_drain_serves_queue(sync_cpu):
    core = SyncCore(sync_cpu)
    gate = threading.Event()
    hits = []
    core.submit(gate.wait)
    for i in range(5):
        core.submit(lambda i=i: hits.append(i))
    gate.set()
    core.shutdown(drain=True)
    assert hits == [0, 1, 2, 3, 4]
    assert core.served_count == 6
    assert core.state is CoreState.SHUT_DOWN


def test_shutdown_with_pending_work_requires_drain(sync_cpu):
    core = SyncCore(sync_cpu)
    gate = threading.Event()
    blocker = core.submit(gate.wait)
    try:
        with pytest.raises(UsageError):
            core.shutdown()
    finally:
        gate.set()
        blocker.wait()
        core.shutdown(drain=True)


def test_submit_after_shutdown_fails(sync_cpu):
    core = SyncCore(sync_cpu)
    core.shutdown()
    with pytest.raises(UsageError):
        core.submit(lambda: None)


def test_shutdown_idempotent(sync_cpu):
    core = SyncCore(sync_cpu)
    core.shutdown()
    core.shutdown()
    assert core.state is CoreState.SHUT_DOWN


def test_seqnos_strictly_increase(sync_cpu):
    core = SyncCore(sync_cpu)
    gate = threading.Event()
    seen = []
    try:
        core.submit(gate.wait)
        while not core._in_service:
            time.sleep(0)
        reqs = []
        for p in (3, 1, 2):
            core.submit(lambda: None, priority=p)
        with core._lock:
            reqs = sorted(r.seqno for _, _, r in core._heap)
        seen = reqs
        gate.set()
    finally:
        core.shutdown(drain=True)
    assert seen == sorted(seen) and len(set(seen)) == len(seen)


def test_fifo_no_starvation_under_contention(sync_cpu):
    core = SyncCore(sync_cpu, AdmissionPolicy.FIFO)
    counts = [0] * 4
    try:
        def worker(i):
            for _ in range(200):
                core.submit(lambda i=i: counts.__setitem__(i, counts[i] + 1)).wait()
        threads = [threading.Thread(target=worker, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    finally:
        core.shutdown(drain=True)
    assert counts == [200] * 4
