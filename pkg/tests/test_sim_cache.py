import pytest

from mbs.sim import CacheState


def test_first_access_misses_then_hits():
    c = CacheState({"R": 4}, l1_capacity_lines=16, hit_cost=1, miss_cost=10)
    cost, misses = c.access_resource("R", 0)
    assert (cost, misses) == (40, 4)
    cost, misses = c.access_resource("R", 0)
    assert (cost, misses) == (4, 0)


def test_ownership_transfer_on_other_core():
    c = CacheState({"R": 4}, l1_capacity_lines=16, hit_cost=1, miss_cost=10)
    c.access_resource("R", 0)
    cost, misses = c.access_resource("R", 1)
    assert misses == 4  # ping-pong
    cost, misses = c.access_resource("R", 0)
    assert misses == 4


def test_capacity_thrash_when_too_large():
    c = CacheState({"R": 8}, l1_capacity_lines=4, hit_cost=0, miss_cost=1)
    c.access_resource("R", 0)
    # walking 8 lines through a 4-line LRU evicts each line before reuse
    cost, misses = c.access_resource("R", 0)
    assert misses == 8


def test_fits_exactly_no_thrash():
    c = CacheState({"R": 4}, l1_capacity_lines=4, hit_cost=0, miss_cost=1)
    c.access_resource("R", 0)
    _, misses = c.access_resource("R", 0)
    assert misses == 0


def test_two_resources_share_capacity():
    c = CacheState({"A": 3, "B": 3}, l1_capacity_lines=4, hit_cost=0, miss_cost=1)
    c.access_resource("A", 0)
    c.access_resource("B", 0)  # evicts part of A
    _, misses = c.access_resource("A", 0)
    assert misses > 0


def test_zero_lines_resource_costs_nothing():
    c = CacheState({}, l1_capacity_lines=4, hit_cost=1, miss_cost=2)
    assert c.access_resource("R", 0) == (0, 0)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        CacheState({}, l1_capacity_lines=4, hit_cost=5, miss_cost=1)
    with pytest.raises(ValueError):
        CacheState({}, l1_capacity_lines=0, hit_cost=0, miss_cost=0)
