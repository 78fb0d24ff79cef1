"""Closed-form Dirichlet edge moments and the two-pass posterior moment engine.

After observing a single instance, the posterior moment of any sum-edge
weight is a convex combination of its prior moment and its one-pseudo-count
updated moment.  The mixing coefficient lambda for every edge comes out of
one bottom-up evaluation and one top-down differentiation of the circuit at
the prior-mean weights, so all edges are served by exactly two passes no
matter how many edges the DAG has.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Sequence, Tuple

from .graph import DirichletPrior, Instance, SpnGraph
from .inference import NEG_INF, CircuitTrace, differentiate, evaluate


class ZeroEvidenceError(ValueError):
    """The instance has zero probability under the evaluation weights.

    Posterior edge moments condition on the observed instance having
    positive mass; the caller must decide policy for impossible evidence.
    """


class MomentFunction(Enum):
    """Scalar function of a single edge weight whose posterior moment is wanted."""

    MEAN = "mean"
    SECOND_MOMENT = "second"
    LOG_MOMENT = "log"


# --- digamma -----------------------------------------------------------------
#
# Recurrence lifts the argument to >= 10, then the asymptotic series with
# Bernoulli-number terms through x^-12.  The correction sum is compensated
# (math.fsum) so small arguments lose nothing to cancellation.

_DIGAMMA_MIN_DIRECT = 10.0


def digamma(x: float) -> float:
    """Digamma (logarithmic derivative of the gamma function) for x > 0."""
    if not (x > 0.0):
        raise ValueError(f"digamma requires a positive argument, got {x!r}")
    corrections = []
    while x < _DIGAMMA_MIN_DIRECT:
        corrections.append(1.0 / x)
        x += 1.0
    r = 1.0 / x
    u = r * r
    tail = u * (
        1.0 / 12.0
        - u * (
            1.0 / 120.0
            - u * (
                1.0 / 252.0
                - u * (1.0 / 240.0 - u * (1.0 / 132.0 - u * (691.0 / 32760.0)))
            )
        )
    )
    value = math.log(x) - 0.5 * r - tail
    if corrections:
        value -= math.fsum(corrections)
    return value


def prior_moment(
    alpha: Sequence[float],
    j: int,
    f: MomentFunction,
    incremented: bool = False,
) -> float:
    """Moment of f(w_j) under Dirichlet(alpha), or under the one-step update.

    ``incremented`` selects the posterior after one pseudo-count was added to
    component j (alpha_j + 1, total + 1).
    """
    a = alpha[j]
    total = math.fsum(alpha)
    if incremented:
        a += 1.0
        total += 1.0
    if f is MomentFunction.MEAN:
        return a / total
    if f is MomentFunction.SECOND_MOMENT:
        return a * (a + 1.0) / (total * (total + 1.0))
    return digamma(a) - digamma(total)


def mean_weights(prior: DirichletPrior) -> Dict[int, Tuple[float, ...]]:
    """Locally normalized weight set equal to the prior Dirichlet means."""
    out = {}
    for k, vec in prior.alpha.items():
        total = math.fsum(vec)
        out[k] = tuple(a / total for a in vec)
    return out


# --- lambda: per-edge share of posterior tree mass ---------------------------

def _lambdas_with_trace(
    graph: SpnGraph,
    weights: Mapping[int, Sequence[float]],
    instance: Instance,
) -> Tuple[Dict[int, List[float]], CircuitTrace]:
    trace = evaluate(graph, weights, instance)
    differentiate(graph, trace)
    root_lv = trace.root_log_value
    if root_lv == NEG_INF:
        raise ZeroEvidenceError(
            "instance has zero probability under the evaluation weights"
        )
    logv = trace.log_values
    logd = trace.log_derivs
    lambdas: Dict[int, List[float]] = {}
    for k in graph.sum_nodes():
        lw = trace._log_weights[k]
        dk = logd[k]
        row = []
        for pos, c in enumerate(graph.children[k]):
            t = lw[pos] + logv[c] + dk - root_lv
            if t == NEG_INF:
                row.append(0.0)
                continue
            lam = math.exp(t)
            if lam > 1.0:
                # Mathematically lambda <= 1; allow float slack that scales
                # with the magnitude of the log factors on deep circuits.
                slack = 1e-12 + 4e-16 * (abs(lw[pos]) + abs(logv[c]) + abs(dk) + abs(root_lv))
                if lam > 1.0 + slack:
                    raise ArithmeticError(
                        f"lambda for edge ({k}, {c}) is {lam!r}, outside [0, 1] "
                        "beyond numerical slack"
                    )
                lam = 1.0
            row.append(lam)
        lambdas[k] = row
    return lambdas, trace


def weight_lambdas(
    graph: SpnGraph,
    weights: Mapping[int, Sequence[float]],
    instance: Instance,
) -> Dict[int, List[float]]:
    """Per-sum-edge lambda at an explicit weight set.

    ``lambda[k][pos] = w * V_child * D_parent / V_root``, the share of the
    instance's tree mass flowing through that edge.  Exactly two circuit
    passes regardless of edge count.
    """
    lambdas, _ = _lambdas_with_trace(graph, weights, instance)
    return lambdas


def compute_lambdas(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
) -> Dict[int, List[float]]:
    """Per-sum-edge lambda at the prior Dirichlet-mean weights."""
    return weight_lambdas(graph, mean_weights(prior), instance)


def z_x(graph: SpnGraph, prior: DirichletPrior, instance: Instance) -> float:
    """Evidence mass of the instance under the prior: the root value at
    Dirichlet-mean weights."""
    lv = evaluate(graph, mean_weights(prior), instance).root_log_value
    return 0.0 if lv == NEG_INF else math.exp(lv)


# --- the full per-edge report -------------------------------------------------

@dataclass(frozen=True)
class EdgeMoment:
    """Moment summary for one sum edge."""

    parent: int
    child: int
    lam: float
    prior_moment: float
    incremented_moment: float
    posterior_moment: float


@dataclass
class MomentReport:
    """Per-edge moments plus the instrumented pass cost of producing them.

    ``edges`` is sorted by (parent id, child position).  A full report costs
    one evaluation pass and one differentiation pass, so
    ``eval_edge_visits == diff_edge_visits == graph.num_edges``.
    """

    function: MomentFunction
    edges: List[EdgeMoment]
    eval_edge_visits: int
    diff_edge_visits: int

    def by_edge(self) -> Dict[Tuple[int, int], EdgeMoment]:
        return {(e.parent, e.child): e for e in self.edges}


def compute_moments(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    f: MomentFunction,
) -> MomentReport:
    """Posterior moment of every sum-edge weight after observing ``instance``.

    Each edge's result is ``(1 - lam) * prior + lam * incremented``; the
    pass count is independent of the number of edges.
    """
    lambdas, trace = _lambdas_with_trace(graph, mean_weights(prior), instance)
    rows: List[EdgeMoment] = []
    for k in sorted(lambdas):
        alpha = prior.alpha[k]
        lam_row = lambdas[k]
        for pos, c in enumerate(graph.children[k]):
            lam = lam_row[pos]
            m0 = prior_moment(alpha, pos, f, incremented=False)
            m1 = prior_moment(alpha, pos, f, incremented=True)
            rows.append(EdgeMoment(k, c, lam, m0, m1, (1.0 - lam) * m0 + lam * m1))
    return MomentReport(f, rows, trace.eval_edge_visits, trace.diff_edge_visits)


def single_edge_moment(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    edge: Tuple[int, int],
    f: MomentFunction,
) -> float:
    """Moment of one edge via fresh evaluation and differentiation passes.

    Costs two full passes per call; looping it over all edges is the
    quadratic baseline that the all-edges report exists to avoid.
    """
    k, j = edge
    pos = graph.child_position(k, j)
    weights = mean_weights(prior)
    trace = evaluate(graph, weights, instance)
    differentiate(graph, trace)
    root_lv = trace.root_log_value
    if root_lv == NEG_INF:
        raise ZeroEvidenceError(
            "instance has zero probability under the evaluation weights"
        )
    t = trace._log_weights[k][pos] + trace.log_values[j] + trace.log_derivs[k] - root_lv
    lam = 0.0 if t == NEG_INF else min(math.exp(t), 1.0)
    m0 = prior_moment(prior.alpha[k], pos, f, incremented=False)
    m1 = prior_moment(prior.alpha[k], pos, f, incremented=True)
    return (1.0 - lam) * m0 + lam * m1
