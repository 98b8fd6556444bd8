import os

import pytest

from mbs import cpu


def pytest_configure(config):
    # Allow pinning-sensitive tests to discover the usable CPU set once.
    config.mbs_allowed = sorted(cpu.allowed_cpus())


@pytest.fixture
def allowed():
    return sorted(cpu.allowed_cpus())


@pytest.fixture
def sync_cpu(allowed):
    """CPU used as the synchronization core in runtime tests."""
    return allowed[-1]


@pytest.fixture
def app_cpu(allowed):
    """CPU distinct from the sync core when the machine has more than one."""
    return allowed[0]


@pytest.fixture(autouse=True)
def _clean_sync_core_env(monkeypatch):
    monkeypatch.delenv(cpu.SYNC_CORES_ENV, raising=False)
