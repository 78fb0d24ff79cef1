"""Online learners driven by per-instance edge responsibilities.

Three updates share the same two-pass lambda computation: a geometric-mean
Dirichlet update (ADF), an arithmetic-mean Dirichlet update (BMM), and a
multiplicative weight update (CCCP).  The Dirichlet learners track a
normalized mean and a scalar concentration per sum node; the concentration
grows by one pseudo-count per observation and hyperparameters are
materialized as mean * concentration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .graph import DirichletPrior, Instance, SpnGraph
from .inference import NEG_INF, log_likelihood
from .moments import ZeroEvidenceError, weight_lambdas

ADF = "adf"
BMM = "bmm"
CCCP = "cccp"
ALGORITHMS = (ADF, BMM, CCCP)

WeightMap = Dict[int, Tuple[float, ...]]


class DomainError(ValueError):
    """Learner state outside the update rule's domain of validity."""


@dataclass(frozen=True)
class DirichletState:
    """Belief state for the Dirichlet learners.

    ``mean[k]`` is the normalized mean weight vector of sum node k and
    ``concentration[k]`` the total pseudo-count; the implied
    hyperparameters are ``mean * concentration``.
    """

    mean: WeightMap
    concentration: Dict[int, float]
    step_count: int = 0

    def __post_init__(self):
        for k, m in self.mean.items():
            if any(x <= 0.0 for x in m):
                raise ValueError(f"non-positive mean entry at node {k}")
            if self.concentration[k] <= 0.0:
                raise ValueError(f"non-positive concentration at node {k}")

    @classmethod
    def from_prior(cls, prior: DirichletPrior) -> "DirichletState":
        mean = {}
        conc = {}
        for k, alpha in prior.alpha.items():
            total = math.fsum(alpha)
            mean[k] = tuple(a / total for a in alpha)
            conc[k] = total
        return cls(mean, conc)

    def alpha(self, k: int) -> Tuple[float, ...]:
        a = self.concentration[k]
        return tuple(m * a for m in self.mean[k])

    def prior(self) -> DirichletPrior:
        return DirichletPrior({k: self.alpha(k) for k in self.mean})


def _require_adf_domain(state: DirichletState):
    for k in state.mean:
        if any(a <= 0.5 for a in state.alpha(k)):
            raise DomainError(
                f"ADF requires every hyperparameter > 1/2 (violated at node {k}); "
                "the geometric-mean update is undefined below that"
            )


def adf_step(state: DirichletState, graph: SpnGraph, instance: Instance) -> DirichletState:
    """Geometric-mean Dirichlet update from one instance.

    For each edge the new unnormalized mean is
    ``((a - 1/2) / (A - 1/2)) ** (1 - lam) * ((a + 1/2) / (A + 1/2)) ** lam``;
    means are renormalized per node and the concentration grows by one.
    Hyperparameters must all exceed 1/2.
    """
    _require_adf_domain(state)
    lambdas = weight_lambdas(graph, state.mean, instance)
    new_mean: WeightMap = {}
    new_conc: Dict[int, float] = {}
    for k, lam_row in lambdas.items():
        total = state.concentration[k]
        alpha = state.alpha(k)
        raw = [
            ((a - 0.5) / (total - 0.5)) ** (1.0 - lam)
            * ((a + 0.5) / (total + 0.5)) ** lam
            for a, lam in zip(alpha, lam_row)
        ]
        s = math.fsum(raw)
        new_mean[k] = tuple(r / s for r in raw)
        new_conc[k] = total + 1.0
    return DirichletState(new_mean, new_conc, state.step_count + 1)


def bmm_step(state: DirichletState, graph: SpnGraph, instance: Instance) -> DirichletState:
    """Arithmetic-mean Dirichlet update from one instance.

    For each edge the new unnormalized mean mixes the prior mean and the
    one-pseudo-count updated mean with weight lambda; means are
    renormalized per node and the concentration grows by one.
    """
    lambdas = weight_lambdas(graph, state.mean, instance)
    new_mean: WeightMap = {}
    new_conc: Dict[int, float] = {}
    for k, lam_row in lambdas.items():
        total = state.concentration[k]
        alpha = state.alpha(k)
        raw = [
            (1.0 - lam) * a / total + lam * (a + 1.0) / (total + 1.0)
            for a, lam in zip(alpha, lam_row)
        ]
        s = math.fsum(raw)
        new_mean[k] = tuple(r / s for r in raw)
        new_conc[k] = total + 1.0
    return DirichletState(new_mean, new_conc, state.step_count + 1)


def cccp_step(
    weights: Mapping[int, Sequence[float]], graph: SpnGraph, instance: Instance
) -> WeightMap:
    """Multiplicative weight update: each sum node's new weights are its
    lambda vector renormalized to sum 1, computed at the current weights.

    A node whose lambda row carries no mass keeps its current weights.
    """
    lambdas = weight_lambdas(graph, weights, instance)
    new: WeightMap = {}
    for k, row in lambdas.items():
        s = sum(row)
        if s <= 0.0:
            new[k] = tuple(weights[k])
        else:
            new[k] = tuple(lam / s for lam in row)
    return new


@dataclass(frozen=True)
class TrainEntry:
    step: int
    log_likelihood: float
    running_avg: float
    updated: bool


@dataclass
class TrainLog:
    """Per-instance predictive log-likelihood, recorded before each update.

    Zero-evidence instances appear with ``-inf`` likelihood and
    ``updated=False``; they are not consumed by the learner and do not enter
    the running average.
    """

    entries: List[TrainEntry] = field(default_factory=list)

    def consumed(self) -> List[TrainEntry]:
        return [e for e in self.entries if e.updated]

    def to_csv(self) -> str:
        lines = ["step,log_likelihood,running_avg"]
        for e in self.entries:
            lines.append(f"{e.step},{_csv_float(e.log_likelihood)},{_csv_float(e.running_avg)}")
        return "\n".join(lines) + "\n"


def _csv_float(x: float) -> str:
    if x == NEG_INF:
        return "-inf"
    if x != x:
        return "nan"
    return format(x, ".15g")


LearnerState = Union[DirichletState, Mapping[int, Sequence[float]]]


def train(
    graph: SpnGraph,
    initial: LearnerState,
    instances: Iterable[Instance],
    algo: str,
    on_zero_evidence: str = "skip",
) -> Tuple[LearnerState, TrainLog]:
    """Apply one update per instance in stream order.

    ``initial`` is a :class:`DirichletState` (or :class:`DirichletPrior`)
    for adf/bmm and a weight mapping for cccp.  The predictive
    log-likelihood of each instance is logged under the pre-update
    parameters (Dirichlet means for adf/bmm, current weights for cccp).
    ``on_zero_evidence`` is ``"skip"`` (log and continue) or ``"abort"``.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm '{algo}', expected one of {ALGORITHMS}")
    if on_zero_evidence not in ("skip", "abort"):
        raise ValueError("on_zero_evidence must be 'skip' or 'abort'")

    if algo == CCCP:
        state: LearnerState = {k: tuple(ws) for k, ws in dict(initial).items()}
    else:
        if isinstance(initial, DirichletPrior):
            state = DirichletState.from_prior(initial)
        elif isinstance(initial, DirichletState):
            state = initial
        else:
            raise TypeError(f"{algo} requires a DirichletState or DirichletPrior")
        if algo == ADF:
            _require_adf_domain(state)

    log = TrainLog()
    finite_total = 0.0
    finite_count = 0
    for step, instance in enumerate(instances, start=1):
        weights = state if algo == CCCP else state.mean
        ll = log_likelihood(graph, weights, instance)
        if ll == NEG_INF:
            if on_zero_evidence == "abort":
                raise ZeroEvidenceError(
                    f"instance {step} has zero probability under the current parameters"
                )
            updated = False
        else:
            if algo == ADF:
                state = adf_step(state, graph, instance)
            elif algo == BMM:
                state = bmm_step(state, graph, instance)
            else:
                state = cccp_step(state, graph, instance)
            finite_total += ll
            finite_count += 1
            updated = True
        avg = finite_total / finite_count if finite_count else float("nan")
        log.entries.append(TrainEntry(step, ll, avg, updated))
    return state, log
