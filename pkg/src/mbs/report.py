"""Figure rendering for the CLI report paths.

Each subcommand can render a PNG next to its delimited output; the CSV
remains the machine contract, figures are for eyeballing.  matplotlib is
imported lazily with the Agg backend so headless runs just work.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .bench.harness import BenchResult
    from .sim.trace import Trace


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save_bench_figure(result: "BenchResult", path: str) -> str:
    """Latency histograms (full cycle and critical section only), log-x."""
    plt = _plt()
    flat = [s for per_thread in result.samples for s in per_thread]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
    for ax, field, label in (
        (axes[0], [s.cycle_ns for s in flat], "full cycle"),
        (axes[1], [s.cs_ns for s in flat], "critical section"),
    ):
        positive = [v for v in field if v > 0] or [1]
        ax.hist(positive, bins=40)
        ax.set_xscale("log")
        ax.set_xlabel("latency [ns]")
        ax.set_title(label)
    axes[0].set_ylabel("samples")
    fig.suptitle(f"{result.config.variant.value}: "
                 f"{result.config.threads} threads x {result.config.cycles} cycles")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_analysis_figure(reports, path: str) -> str:
    """Response-time bounds vs periods, one bar group per protocol."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 3.5))
    if reports:
        tasks = [r.task_id for r in reports[0].results]
        width = 0.8 / max(1, len(reports))
        for k, report in enumerate(reports):
            xs = [i + k * width for i in range(len(report.results))]
            ax.bar(xs, [r.r for r in report.results], width=width,
                   label=report.protocol.value)
        ax.set_xticks([i + 0.4 - width / 2 for i in range(len(tasks))])
        ax.set_xticklabels(tasks)
        ax.legend(fontsize=8)
    ax.set_ylabel("response-time bound [ticks]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_sim_figure(trace: "Trace", path: str, bounds_paper=None,
                    bounds_conservative=None) -> str:
    """Observed maxima with analysis bounds overlaid where available."""
    from .sim.trace import observed_response_times
    plt = _plt()
    observed = observed_response_times(trace)
    tasks = sorted(observed)
    fig, ax = plt.subplots(figsize=(8, 3.5))
    xs = range(len(tasks))
    ax.bar(xs, [observed[t].max_response or 0 for t in tasks], width=0.5,
           label="observed max")
    for bounds, marker, label in ((bounds_paper, "v", "per-section bound"),
                                  (bounds_conservative, "^", "conservative bound")):
        if bounds:
            ax.plot(list(xs), [bounds.get(t) for t in tasks], marker,
                    linestyle="none", label=label)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(tasks)
    ax.set_ylabel("response time [ticks]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_fuzz_figure(points, path: str) -> str:
    """Observed vs conservative bound scatter; the diagonal is the safety line."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    if points:
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        ax.scatter(xs, ys, s=8, alpha=0.4)
        lim = max(max(xs), max(ys)) * 1.05
        ax.plot([0, lim], [0, lim], "k--", linewidth=0.8)
        ax.set_xlim(0, lim)
        ax.set_ylim(0, lim)
    ax.set_xlabel("conservative bound [ticks]")
    ax.set_ylabel("observed max response [ticks]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
