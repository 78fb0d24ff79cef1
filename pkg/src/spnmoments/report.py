"""Headless matplotlib rendering for benchmark and training reports.

Figures are drawn straight onto :class:`matplotlib.figure.Figure` objects
(no pyplot global state), so rendering works in any headless environment
and never touches an interactive backend.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .cli import BenchReport
    from .online import TrainLog


def render_bench_figure(report: "BenchReport", path: str):
    """Log-log scaling plot: seconds per all-edges moment query vs edge count."""
    from matplotlib.figure import Figure

    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.subplots()
    edges = [s.edges for s in report.samples]
    seconds = [s.seconds for s in report.samples]
    ax.loglog(edges, seconds, "o-", label="two-pass, all edges")
    naive = [(s.edges, s.naive_seconds) for s in report.samples if s.naive_seconds is not None]
    if naive:
        ax.loglog([e for e, _ in naive], [t for _, t in naive], "s--",
                  label="per-edge recomputation")
    # slope-1 guide through the first measured point
    e0, t0 = edges[0], seconds[0]
    ax.loglog(edges, [t0 * e / e0 for e in edges], ":", color="gray", label="linear guide")
    ax.set_xlabel("edges")
    ax.set_ylabel("seconds per moment query")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def render_train_figure(log: "TrainLog", path: str):
    """Predictive log-likelihood per step with its running average."""
    from matplotlib.figure import Figure

    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.subplots()
    finite = [(e.step, e.log_likelihood) for e in log.entries
              if e.log_likelihood == e.log_likelihood and e.log_likelihood != float("-inf")]
    if finite:
        ax.plot([s for s, _ in finite], [v for _, v in finite], ".",
                alpha=0.35, label="per instance")
    avg = [(e.step, e.running_avg) for e in log.entries if e.running_avg == e.running_avg]
    if avg:
        ax.plot([s for s, _ in avg], [v for _, v in avg], "-", label="running average")
    skipped = sum(1 for e in log.entries if not e.updated)
    title = f"{len(log.entries)} instances"
    if skipped:
        title += f" ({skipped} zero-evidence, skipped)"
    ax.set_title(title)
    ax.set_xlabel("step")
    ax.set_ylabel("predictive log-likelihood")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
