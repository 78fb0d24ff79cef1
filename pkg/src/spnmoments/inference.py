"""Circuit evaluation, differentiation, likelihood queries, and tree counting.

All node values and derivatives live in log space with ``-inf`` as the
explicit zero marker, so deep networks neither underflow nor overflow.
One evaluation pass and one differentiation pass each touch every edge
exactly once; the passes keep per-edge visit counters so linear-time
claims are assertable.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from .graph import Instance, NodeKind, SpnGraph, marginal_instance

NEG_INF = float("-inf")

_SUM = 0
_PROD = 1
_LEAF = 2


class _Compiled:
    """Flat integer-coded view of a graph, cached per graph instance."""

    __slots__ = ("order", "codes", "children", "leaf_var", "leaf_value", "root", "num_edges")

    def __init__(self, graph: SpnGraph):
        code_of = {NodeKind.SUM: _SUM, NodeKind.PRODUCT: _PROD, NodeKind.LEAF: _LEAF}
        self.codes = [code_of[k] for k in graph.kinds]
        self.children = graph.children
        self.leaf_var = [graph.leaf_var.get(i, -1) for i in range(graph.num_nodes)]
        self.leaf_value = [graph.leaf_value.get(i, -1) for i in range(graph.num_nodes)]
        self.order = graph.topo_order
        self.root = graph.root
        self.num_edges = graph.num_edges


_COMPILED: "weakref.WeakKeyDictionary[SpnGraph, _Compiled]" = weakref.WeakKeyDictionary()


def _compiled(graph: SpnGraph) -> _Compiled:
    comp = _COMPILED.get(graph)
    if comp is None:
        comp = _Compiled(graph)
        _COMPILED[graph] = comp
    return comp


@dataclass
class CircuitTrace:
    """Cached per-node forward values and backward derivatives for one query.

    ``log_values[k]`` is the log of node k's value under (weights, instance);
    ``log_derivs[k]`` is the log of the root's partial derivative with
    respect to node k, filled by :func:`differentiate`.  ``-inf`` marks an
    exact zero in either array.  A trace is owned by its query; do not share
    one across concurrent writers.
    """

    graph: SpnGraph
    weights: Mapping[int, Sequence[float]]
    instance: Instance
    log_values: List[float]
    log_derivs: Optional[List[float]] = None
    eval_edge_visits: int = 0
    diff_edge_visits: int = 0
    # product-node bookkeeping reused by the backward pass
    _zero_children: List[int] = field(default=None, repr=False)
    _log_nonzero: List[float] = field(default=None, repr=False)
    _log_weights: Dict[int, List[float]] = field(default=None, repr=False)

    @property
    def root_log_value(self) -> float:
        return self.log_values[self.graph.root]

    def value(self, node: int) -> float:
        lv = self.log_values[node]
        return 0.0 if lv == NEG_INF else math.exp(lv)

    def deriv(self, node: int) -> float:
        if self.log_derivs is None:
            raise ValueError("derivatives not populated; run differentiate() first")
        ld = self.log_derivs[node]
        return 0.0 if ld == NEG_INF else math.exp(ld)


def _log_weight_rows(graph: SpnGraph, weights: Mapping[int, Sequence[float]]) -> Dict[int, List[float]]:
    rows: Dict[int, List[float]] = {}
    for k in graph.sum_nodes():
        try:
            ws = weights[k]
        except KeyError:
            raise ValueError(f"missing weight vector for sum node {k}") from None
        if len(ws) != len(graph.children[k]):
            raise ValueError(
                f"weight vector for sum node {k} has length {len(ws)}, "
                f"expected {len(graph.children[k])}"
            )
        row = []
        for w in ws:
            if w < 0.0:
                raise ValueError(f"negative weight {w!r} on sum node {k}")
            row.append(math.log(w) if w > 0.0 else NEG_INF)
        rows[k] = row
    return rows


def evaluate(graph: SpnGraph, weights: Mapping[int, Sequence[float]], instance: Instance) -> CircuitTrace:
    """One bottom-up pass; caches every node value in the returned trace.

    Leaves evaluate to 1 when their variable is marginalized (``None``) or
    matches the indicator, else 0.  Weights need not be locally normalized;
    normalization is a validation-level property, and unnormalized weights
    are meaningful for polynomial-level queries.
    """
    comp = _compiled(graph)
    if len(instance) != graph.num_vars:
        raise ValueError(f"instance has {len(instance)} variables, graph has {graph.num_vars}")
    for var, x in enumerate(instance):
        if x is not None and not (0 <= x < graph.arities[var]):
            raise ValueError(f"value {x} out of range for variable {var}")

    log_weights = _log_weight_rows(graph, weights)
    n = len(comp.codes)
    logv = [0.0] * n
    zero_children = [0] * n
    log_nonzero = [0.0] * n
    visits = 0
    codes = comp.codes
    children = comp.children

    for nid in comp.order:
        code = codes[nid]
        if code == _LEAF:
            x = instance[comp.leaf_var[nid]]
            logv[nid] = 0.0 if (x is None or x == comp.leaf_value[nid]) else NEG_INF
        elif code == _PROD:
            ch = children[nid]
            visits += len(ch)
            zeros = 0
            acc = 0.0
            for c in ch:
                lv = logv[c]
                if lv == NEG_INF:
                    zeros += 1
                else:
                    acc += lv
            zero_children[nid] = zeros
            log_nonzero[nid] = acc
            logv[nid] = acc if zeros == 0 else NEG_INF
        else:
            ch = children[nid]
            lw = log_weights[nid]
            visits += len(ch)
            best = NEG_INF
            terms = []
            for pos in range(len(ch)):
                t = lw[pos] + logv[ch[pos]]
                terms.append(t)
                if t > best:
                    best = t
            if best == NEG_INF:
                logv[nid] = NEG_INF
            else:
                s = 0.0
                for t in terms:
                    s += math.exp(t - best)
                logv[nid] = best + math.log(s)

    return CircuitTrace(
        graph=graph,
        weights=weights,
        instance=tuple(instance),
        log_values=logv,
        eval_edge_visits=visits,
        _zero_children=zero_children,
        _log_nonzero=log_nonzero,
        _log_weights=log_weights,
    )


def differentiate(graph: SpnGraph, trace: CircuitTrace) -> CircuitTrace:
    """One top-down pass filling ``trace.log_derivs``; returns the trace.

    The root derivative is 1.  A sum parent k adds ``w_{k,j} * D_k`` to
    child j; a product parent adds ``D_k`` times the product of the other
    children's values, recovered in O(1) per child from the zero-child
    count and nonzero log-sum cached by :func:`evaluate`.
    """
    if trace.graph is not graph:
        raise ValueError("trace was produced for a different graph")
    if trace.log_values is None or len(trace.log_values) != graph.num_nodes:
        raise ValueError("trace values not populated")
    comp = _compiled(graph)
    n = len(comp.codes)
    logd = [NEG_INF] * n
    logd[comp.root] = 0.0
    logv = trace.log_values
    codes = comp.codes
    children = comp.children
    visits = 0

    for nid in reversed(comp.order):
        code = codes[nid]
        if code == _LEAF:
            continue
        ch = children[nid]
        visits += len(ch)
        dk = logd[nid]
        if code == _SUM:
            lw = trace._log_weights[nid]
            for pos in range(len(ch)):
                t = dk + lw[pos]
                if t != NEG_INF:
                    c = ch[pos]
                    cur = logd[c]
                    logd[c] = t if cur == NEG_INF else _log_add(cur, t)
        else:
            zeros = trace._zero_children[nid]
            acc = trace._log_nonzero[nid]
            for c in ch:
                lv = logv[c]
                if zeros == 0:
                    sib = acc - lv
                elif zeros == 1 and lv == NEG_INF:
                    sib = acc
                else:
                    continue
                t = dk + sib
                if t != NEG_INF:
                    cur = logd[c]
                    logd[c] = t if cur == NEG_INF else _log_add(cur, t)

    trace.log_derivs = logd
    trace.diff_edge_visits = visits
    return trace


def _log_add(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def log_likelihood(graph: SpnGraph, weights: Mapping[int, Sequence[float]], instance: Instance) -> float:
    """Normalized log-probability of ``instance``; ``-inf`` marks zero mass.

    The normalizer is the root value on the all-marginalized instance, which
    is 1 for locally normalized weights.
    """
    num = evaluate(graph, weights, instance).root_log_value
    if num == NEG_INF:
        return NEG_INF
    den = evaluate(graph, weights, marginal_instance(graph)).root_log_value
    return num - den


def count_induced_trees(graph: SpnGraph) -> int:
    """Number of unique induced trees, exactly.

    Evaluates the circuit with every weight and leaf set to 1 in arbitrary
    precision integer arithmetic; the count grows exponentially with network
    height, so floats would overflow and are never used here.
    """
    comp = _compiled(graph)
    vals = [0] * len(comp.codes)
    for nid in comp.order:
        code = comp.codes[nid]
        if code == _LEAF:
            vals[nid] = 1
        elif code == _PROD:
            p = 1
            for c in comp.children[nid]:
                p *= vals[c]
            vals[nid] = p
        else:
            s = 0
            for c in comp.children[nid]:
                s += vals[c]
            vals[nid] = s
    return vals[comp.root]
