"""Seeded random task-set generation for fuzzing the analyses.

Utilizations are drawn with the classic UUniFast recursion per core and
scaled to the target; periods come from a divisor-friendly pool so the
hyperperiod stays small.  Each task gets up to two critical sections of at
most 20 % of its execution time; every resource gets its own
synchronization core (the analytic bounds assume that; sharing is modeled
with group locks instead).
"""

from __future__ import annotations

import random

from ..errors import ValidationError
from ..analysis.model import Cs, Exec, ResourceSpec, TaskSet, TaskSpec

# every entry divides 600, so any mix keeps the hyperperiod <= 600
DEFAULT_PERIOD_POOL = (10, 12, 15, 20, 25, 30, 40, 50, 60, 75, 100, 120, 150, 200)


def uunifast(rng: random.Random, n: int, total: float) -> list[float]:
    remaining = total
    shares = []
    for i in range(n - 1):
        nxt = remaining * rng.random() ** (1.0 / (n - i))
        shares.append(remaining - nxt)
        remaining = nxt
    shares.append(remaining)
    return shares


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` pieces, each >= 1."""
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    edges = [0] + cuts + [total]
    return [b - a for a, b in zip(edges, edges[1:])]


def generate_taskset(seed: int, n_tasks: int, n_cores: int, n_resources: int,
                     utilization: float, *,
                     period_pool=DEFAULT_PERIOD_POOL) -> TaskSet:
    """Deterministic per seed; ``utilization`` is the per-core target."""
    if utilization <= 0:
        raise ValidationError("utilization target must be > 0")
    if n_tasks < 1 or n_cores < 1 or n_resources < 0:
        raise ValidationError("need n_tasks >= 1, n_cores >= 1, n_resources >= 0")
    rng = random.Random(seed)

    processors = [i % n_cores for i in range(n_tasks)]
    rng.shuffle(processors)
    by_core: dict[int, list[int]] = {}
    for idx, proc in enumerate(processors):
        by_core.setdefault(proc, []).append(idx)

    periods = [rng.choice(period_pool) for _ in range(n_tasks)]
    wcets = [0] * n_tasks
    for proc, members in by_core.items():
        for idx, share in zip(members, uunifast(rng, len(members), utilization)):
            wcets[idx] = max(1, round(share * periods[idx]))

    # rate-monotonic priorities: shorter period is more urgent, ties by index
    order = sorted(range(n_tasks), key=lambda i: (periods[i], i))
    priority = [0] * n_tasks
    for rank, idx in enumerate(order):
        priority[idx] = n_tasks - rank

    tasks = []
    for i in range(n_tasks):
        e = min(wcets[i], periods[i])
        n_cs = 0
        if n_resources > 0:
            n_cs = rng.choice((0, 1, 1, 2))
            while n_cs > 0 and e < 2 * n_cs + 1:
                n_cs -= 1
        if n_cs == 0:
            segments = (Exec(e),)
        else:
            cs_budget = max(1, e // 5)
            cs_durs = [rng.randint(1, cs_budget) for _ in range(n_cs)]
            while sum(cs_durs) > e - (n_cs + 1):
                cs_durs[cs_durs.index(max(cs_durs))] -= 1
            exec_durs = _split(rng, e - sum(cs_durs), n_cs + 1)
            segments = []
            for j, d in enumerate(cs_durs):
                segments.append(Exec(exec_durs[j]))
                segments.append(Cs(f"R{rng.randrange(n_resources)}", d))
            segments.append(Exec(exec_durs[-1]))
            segments = tuple(segments)
        tasks.append(TaskSpec(
            id=f"T{i}", period=periods[i], wcet=e, priority=priority[i],
            processor=processors[i], segments=segments,
        ))

    resources = tuple(
        ResourceSpec(id=f"R{j}", sync_core=n_cores + j) for j in range(n_resources)
    )
    return TaskSet(tasks=tuple(tasks), resources=resources, delta=0)
