"""Cross-validation of the analysis bounds against the simulator.

Two fuzz drivers over seeded random task sets:

* soundness: simulated per-task maximum response times must never exceed the
  conservative analysis bound.  The comparison applies to task sets whose
  conservative analysis deems every task schedulable (that is when the
  bounds are claimed; an unschedulable task may backlog and is reported with
  the exceeding value, not a bound).  Exceedances of the tighter
  per-section bound are recorded as findings, never as failures.
* schedule equivalence: with zero migration cost and uniform cache costs,
  reservation-mode migration under FIFO admission must produce exactly the
  ticket-spinlock service sequence, and plain migration must not worsen any
  task's observed response versus the spinlock.

Simulations run with zero cache costs for the soundness comparison (the
analytic model carries no cache terms) and the migration cost wired to the
task set's delta.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .analysis import AnalysisProtocol, TaskSet, schedulability_test
from .sim import (
    AdmissionOrder,
    SimParams,
    SimProtocol,
    generate_taskset,
    observed_response_times,
    simulate,
)


@dataclass(frozen=True, slots=True)
class Finding:
    seed: int
    task_id: str
    observed: int
    bound: int
    kind: str  # "conservative-violation" | "paper-exceedance"


@dataclass
class SoundnessReport:
    sets_run: int = 0
    sets_checked: int = 0            # conservative analysis fully schedulable
    jobs_checked: int = 0
    conservative_violations: list[Finding] = field(default_factory=list)
    paper_exceedances: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conservative_violations


def _draw_dimensions(rng: random.Random, max_tasks: int, max_cores: int,
                     max_resources: int):
    n_cores = rng.randint(1, max_cores)
    n_tasks = rng.randint(max(2, n_cores), max_tasks)
    n_resources = rng.randint(1, max_resources)
    return n_tasks, n_cores, n_resources


def fuzz_taskset(seed: int, *, max_tasks: int = 6, max_cores: int = 3,
                 max_resources: int = 2, utilization: float = 0.5,
                 delta_choices=(0, 1, 2)) -> TaskSet:
    rng = random.Random(seed)
    n_tasks, n_cores, n_resources = _draw_dimensions(
        rng, max_tasks, max_cores, max_resources)
    ts = generate_taskset(rng.randrange(2**31), n_tasks, n_cores, n_resources,
                          utilization)
    return replace(ts, delta=rng.choice(tuple(delta_choices)))


def check_taskset_soundness(ts: TaskSet, seed: int, report: SoundnessReport):
    """Compare one task set's simulated responses against both bounds."""
    conservative = schedulability_test(ts, AnalysisProtocol.MBS_CONSERVATIVE)
    paper = schedulability_test(ts, AnalysisProtocol.MBS_PAPER)
    trace = simulate(ts, SimParams(
        protocol=SimProtocol.MBS,
        migration_cost=ts.delta,
        admission=AdmissionOrder.PRIORITY,
    ))
    observed = observed_response_times(trace)

    report.sets_run += 1
    cons_by_id = {r.task_id: r for r in conservative.results}
    paper_by_id = {r.task_id: r for r in paper.results}

    if conservative.schedulable:
        report.sets_checked += 1
        for task_id, obs in observed.items():
            if obs.max_response is None:
                continue
            report.jobs_checked += obs.completed
            bound = cons_by_id[task_id].r
            if obs.max_response > bound:
                report.conservative_violations.append(Finding(
                    seed, task_id, obs.max_response, bound,
                    "conservative-violation"))

    for task_id, obs in observed.items():
        res = paper_by_id[task_id]
        if res.schedulable and obs.max_response is not None \
                and obs.max_response > res.r:
            report.paper_exceedances.append(Finding(
                seed, task_id, obs.max_response, res.r, "paper-exceedance"))


def run_soundness_fuzz(n_sets: int, seed: int = 1, *, max_tasks: int = 6,
                       max_cores: int = 3, max_resources: int = 2,
                       utilization: float = 0.5,
                       delta_choices=(0, 1, 2)) -> SoundnessReport:
    report = SoundnessReport()
    for k in range(n_sets):
        ts = fuzz_taskset(seed + k, max_tasks=max_tasks, max_cores=max_cores,
                          max_resources=max_resources, utilization=utilization,
                          delta_choices=delta_choices)
        check_taskset_soundness(ts, seed + k, report)
    return report


@dataclass(frozen=True, slots=True)
class Regression:
    seed: int
    task_id: str
    migrating: int
    spinning: int


@dataclass
class EquivalenceReport:
    sets_run: int = 0
    sequence_mismatches: list[int] = field(default_factory=list)  # seeds
    regressions: list[Regression] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.sequence_mismatches and not self.regressions


def check_equivalence(ts: TaskSet, seed: int, report: EquivalenceReport,
                      *, uniform_cost: int = 0, lines_per_resource: int = 0):
    """Service-sequence equality and never-worse responses at zero overhead."""
    ts = replace(ts, delta=0)
    lines = {r.id: lines_per_resource for r in ts.resources}

    def params(protocol):
        return SimParams(
            protocol=protocol, migration_cost=0,
            resource_lines=lines, hit_cost=uniform_cost, miss_cost=uniform_cost,
            admission=AdmissionOrder.FIFO,
        )

    spin = simulate(ts, params(SimProtocol.SPIN_FIFO))
    reserved = simulate(ts, params(SimProtocol.MBS_R))
    migrating = simulate(ts, params(SimProtocol.MBS))

    report.sets_run += 1
    if reserved.service_sequence() != spin.service_sequence():
        report.sequence_mismatches.append(seed)

    spin_obs = observed_response_times(spin)
    mbs_obs = observed_response_times(migrating)
    for task_id, spin_r in spin_obs.items():
        mbs_r = mbs_obs[task_id]
        if spin_r.max_response is None or mbs_r.max_response is None:
            continue
        if mbs_r.max_response > spin_r.max_response:
            report.regressions.append(Regression(
                seed, task_id, mbs_r.max_response, spin_r.max_response))


def run_equivalence_fuzz(n_sets: int, seed: int = 1, *, max_tasks: int = 6,
                         max_cores: int = 3, max_resources: int = 2,
                         utilization: float = 0.5) -> EquivalenceReport:
    report = EquivalenceReport()
    for k in range(n_sets):
        ts = fuzz_taskset(seed + k, max_tasks=max_tasks, max_cores=max_cores,
                          max_resources=max_resources, utilization=utilization,
                          delta_choices=(0,))
        uniform = (seed + k) % 2  # alternate free and uniform-cost caches
        check_equivalence(ts, seed + k, report,
                          uniform_cost=uniform,
                          lines_per_resource=4 if uniform else 0)
    return report


def minimize_regression(seed: int, **fuzz_kw) -> TaskSet:
    """Shrink a regressing task set by dropping tasks while it still regresses."""
    ts = fuzz_taskset(seed, **fuzz_kw)

    def regresses(candidate: TaskSet) -> bool:
        rep = EquivalenceReport()
        check_equivalence(candidate, seed, rep)
        return not rep.ok

    changed = True
    while changed:
        changed = False
        for drop in list(ts.tasks):
            candidate = replace(ts, tasks=tuple(t for t in ts.tasks if t is not drop))
            if candidate.tasks and regresses(candidate):
                ts = candidate
                changed = True
                break
    return ts
