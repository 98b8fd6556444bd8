import pytest

from mbs.analysis import (
    Cs,
    Exec,
    ResourceSpec,
    TaskSet,
    TaskSpec,
    blocking_mbs_conservative,
    blocking_mbs_per_section,
    blocking_spin_fifo,
)
from mbs.errors import ValidationError


def three_sharers(delta=0):
    """t has one CS on R; the other users' CS lengths on R are 3 and 5."""
    return TaskSet(
        tasks=(
            TaskSpec("t", 100, 10, 3, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("u", 50, 5, 2, 1, (Exec(2), Cs("R", 3))),
            TaskSpec("v", 80, 8, 1, 1, (Exec(3), Cs("R", 5))),
        ),
        resources=(ResourceSpec("R", 9),),
        delta=delta,
    )


def test_per_section_bound_max_over_other_users():
    ts = three_sharers()
    b = blocking_mbs_per_section(ts.task("t"), ts)
    assert (b.local, b.remote) == (0, 5)


def test_per_section_bound_adds_two_migrations():
    ts = three_sharers(delta=2)
    b = blocking_mbs_per_section(ts.task("t"), ts)
    assert (b.local, b.remote) == (0, 5 + 4)


def test_no_critical_sections_zero():
    ts = TaskSet(tasks=(TaskSpec("t", 10, 2, 1, 0),), delta=3)
    b = blocking_mbs_per_section(ts.task("t"), ts)
    assert (b.local, b.remote) == (0, 0)


def test_sole_user_pays_migrations_only():
    ts = TaskSet(
        tasks=(TaskSpec("t", 10, 3, 1, 0, (Exec(2), Cs("R", 1))),),
        resources=(ResourceSpec("R", 5),),
        delta=2,
    )
    b = blocking_mbs_per_section(ts.task("t"), ts)
    assert (b.local, b.remote) == (0, 4)


def test_conservative_single_job_in_window():
    ts = TaskSet(
        tasks=(
            TaskSpec("t", 100, 10, 2, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("u", 50, 6, 1, 1, (Exec(1), Cs("R", 5))),
        ),
        resources=(ResourceSpec("R", 9),),
        delta=1,
    )
    # window <= min period -> one competing job
    b = blocking_mbs_conservative(ts.task("t"), ts, window=50)
    assert (b.local, b.remote) == (0, 5 + 2)


def test_conservative_two_jobs_in_double_period():
    ts = TaskSet(
        tasks=(
            TaskSpec("t", 300, 10, 2, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("u", 50, 6, 1, 1, (Exec(3), Cs("R", 3))),
        ),
        resources=(ResourceSpec("R", 9),),
    )
    b = blocking_mbs_conservative(ts.task("t"), ts, window=100)
    assert (b.local, b.remote) == (0, 6)  # ceil(100/50)=2 jobs of 3


def test_conservative_no_competitors():
    ts = TaskSet(
        tasks=(TaskSpec("t", 10, 3, 1, 0, (Exec(2), Cs("R", 1))),),
        resources=(ResourceSpec("R", 5),),
        delta=2,
    )
    b = blocking_mbs_conservative(ts.task("t"), ts, window=5)
    assert (b.local, b.remote) == (0, 4)


def test_conservative_requires_window():
    ts = three_sharers()
    with pytest.raises(ValidationError):
        blocking_mbs_conservative(ts.task("t"), ts, window=0)


def test_conservative_monotone_in_window():
    ts = three_sharers()
    values = [blocking_mbs_conservative(ts.task("t"), ts, window=w).remote
              for w in (1, 10, 50, 80, 100, 200, 400)]
    assert values == sorted(values)


def test_conservative_dominates_per_section():
    ts = three_sharers(delta=1)
    for task in ts.tasks:
        paper = blocking_mbs_per_section(task, ts)
        for w in (1, 40, 100, 1000):
            cons = blocking_mbs_conservative(task, ts, window=w)
            assert cons.remote >= paper.remote
            assert cons.local >= paper.local


def test_spin_remote_one_section_per_other_processor():
    ts = TaskSet(
        tasks=(
            TaskSpec("t", 100, 10, 3, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("u", 50, 6, 2, 1, (Exec(2), Cs("R", 4))),
            TaskSpec("v", 80, 8, 1, 1, (Exec(5), Cs("R", 3))),
        ),
        resources=(ResourceSpec("R", 9),),
    )
    b = blocking_spin_fifo(ts.task("t"), ts)
    assert b.remote == 4  # longest section from the single other processor
    assert b.local == 0   # no lower-priority task on processor 0


def test_spin_uniprocessor_no_remote():
    ts = TaskSet(
        tasks=(
            TaskSpec("hi", 100, 10, 2, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("lo", 50, 6, 1, 0, (Exec(2), Cs("R", 4))),
        ),
        resources=(ResourceSpec("R", 9),),
    )
    b = blocking_spin_fifo(ts.task("hi"), ts)
    assert b.remote == 0
    assert b.local == 4  # lower-priority section on own processor, once


def test_spin_local_zero_without_lower_priority():
    ts = TaskSet(
        tasks=(
            TaskSpec("hi", 100, 10, 2, 0, (Exec(9), Cs("R", 1))),
            TaskSpec("lo", 50, 6, 1, 1, (Exec(2), Cs("R", 4))),
        ),
        resources=(ResourceSpec("R", 9),),
    )
    assert blocking_spin_fifo(ts.task("hi"), ts).local == 0


def test_shared_sync_core_rejected_for_mbs_bounds():
    ts = TaskSet(
        tasks=(
            TaskSpec("t", 100, 10, 2, 0, (Exec(9), Cs("A", 1))),
            TaskSpec("u", 50, 6, 1, 1, (Exec(2), Cs("B", 4))),
        ),
        resources=(ResourceSpec("A", 9), ResourceSpec("B", 9)),
    )
    with pytest.raises(ValidationError):
        blocking_mbs_per_section(ts.task("t"), ts)
    # the spin baseline executes sections locally and does not care
    blocking_spin_fifo(ts.task("t"), ts)


def test_group_counts_sharers_across_members():
    ts = TaskSet(
        tasks=(
            TaskSpec("t", 100, 10, 2, 0, (Exec(9), Cs("A", 1))),
            TaskSpec("u", 50, 6, 1, 1, (Exec(2), Cs("B", 4))),
        ),
        resources=(ResourceSpec("A", 9, group="g"), ResourceSpec("B", 8, group="g")),
    )
    from mbs.analysis import expand_group_locks
    expanded = expand_group_locks(ts)
    b = blocking_mbs_per_section(expanded.task("t"), expanded)
    assert b.remote == 4  # the other group member's section now competes
