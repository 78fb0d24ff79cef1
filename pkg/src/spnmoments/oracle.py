"""Exponential-time ground truth for desk-scale networks, plus fixture factories.

Everything here is deliberately brute force: induced trees are enumerated
one by one and queries are answered by summing per-tree terms.  The fast
engine in :mod:`spnmoments.inference` and :mod:`spnmoments.moments` is
cross-checked against these answers in the test suite.  A hard cap on the
tree count turns the exponential blowup into a controlled refusal.
"""
from __future__ import annotations

import itertools
import math
import random
import weakref
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .graph import (
    DirichletPrior,
    GraphBuilder,
    Instance,
    NodeKind,
    SpnGraph,
    validate,
)
from .inference import count_induced_trees
from .moments import MomentFunction, ZeroEvidenceError, mean_weights, prior_moment

DEFAULT_TREE_CAP = 100_000


class CapExceededError(RuntimeError):
    """Refusal to enumerate: the induced-tree count exceeds the cap."""


class GenerationError(ValueError):
    """Random network parameters are infeasible."""


@dataclass(frozen=True)
class InducedTree:
    """One induced tree: the root plus one child per sum node and all
    children per product node, recorded as (parent, child) edges."""

    root: int
    edges: Tuple[Tuple[int, int], ...]
    nodes: frozenset
    edge_set: frozenset

    @classmethod
    def from_edges(cls, root: int, edges: Tuple[Tuple[int, int], ...]) -> "InducedTree":
        nodes = frozenset(itertools.chain((root,), (c for _, c in edges)))
        return cls(root, edges, nodes, frozenset(edges))


_TREES: "weakref.WeakKeyDictionary[SpnGraph, List[InducedTree]]" = weakref.WeakKeyDictionary()


def enumerate_trees(graph: SpnGraph, cap: int = DEFAULT_TREE_CAP) -> List[InducedTree]:
    """All distinct induced trees, depth-first over sum choices in child order.

    Raises :class:`CapExceededError` before doing any work if the exact
    count exceeds ``cap``.  Results are cached per graph (the tree list is
    immutable); the cap is re-checked on cache hits.
    """
    tau = count_induced_trees(graph)
    if tau > cap:
        raise CapExceededError(f"{tau} induced trees exceed the cap of {cap}")
    cached = _TREES.get(graph)
    if cached is not None:
        return cached
    memo: Dict[int, Tuple[Tuple[Tuple[int, int], ...], ...]] = {}
    for v in graph.topo_order:
        kind = graph.kinds[v]
        if kind is NodeKind.LEAF:
            memo[v] = ((),)
        elif kind is NodeKind.SUM:
            memo[v] = tuple(
                ((v, c),) + sub
                for c in graph.children[v]
                for sub in memo[c]
            )
        else:
            own = tuple((v, c) for c in graph.children[v])
            memo[v] = tuple(
                own + tuple(itertools.chain.from_iterable(combo))
                for combo in itertools.product(*(memo[c] for c in graph.children[v]))
            )
    trees = [InducedTree.from_edges(graph.root, edges) for edges in memo[graph.root]]
    _TREES[graph] = trees
    return trees


def tree_leaf_product(graph: SpnGraph, tree: InducedTree, instance: Instance) -> float:
    """Product of the tree's leaf indicator values under the instance (0 or 1)."""
    for nid in tree.nodes:
        if graph.kinds[nid] is NodeKind.LEAF:
            x = instance[graph.leaf_var[nid]]
            if x is not None and x != graph.leaf_value[nid]:
                return 0.0
    return 1.0


def tree_weight_product(
    graph: SpnGraph, tree: InducedTree, weights: Mapping[int, Sequence[float]]
) -> float:
    """Product over the tree's sum edges of the given edge weights."""
    p = 1.0
    for k, j in tree.edges:
        if graph.kinds[k] is NodeKind.SUM:
            p *= weights[k][graph.child_position(k, j)]
    return p


def oracle_polynomial(
    graph: SpnGraph,
    weights: Mapping[int, Sequence[float]],
    instance: Instance,
    cap: int = DEFAULT_TREE_CAP,
) -> float:
    """Root value by explicit monomial expansion: sum over induced trees of
    (leaf product) * (weight product)."""
    trees = enumerate_trees(graph, cap)
    return math.fsum(
        tree_leaf_product(graph, t, instance) * tree_weight_product(graph, t, weights)
        for t in trees
    )


def edge_tree_masses(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    cap: int = DEFAULT_TREE_CAP,
) -> Tuple[float, Dict[Tuple[int, int], float]]:
    """Total evidence mass and, per sum edge, the mass of trees containing it.

    Each tree contributes (leaf product) * (prior-mean weight product); the
    total over all trees is the evidence mass of the instance.
    """
    trees = enumerate_trees(graph, cap)
    w = mean_weights(prior)
    mass = {edge: 0.0 for edge in graph.sum_edges()}
    terms = []
    for t in trees:
        cu = tree_leaf_product(graph, t, instance) * tree_weight_product(graph, t, w)
        terms.append(cu)
        if cu:
            for k, j in t.edges:
                if graph.kinds[k] is NodeKind.SUM:
                    mass[(k, j)] += cu
    return math.fsum(terms), mass


def oracle_lambda(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    edge: Tuple[int, int],
    cap: int = DEFAULT_TREE_CAP,
) -> float:
    """Fraction of evidence mass carried by trees containing ``edge``."""
    z, mass = edge_tree_masses(graph, prior, instance, cap)
    if z == 0.0:
        raise ZeroEvidenceError("instance has zero probability under the prior means")
    return mass[edge] / z


def oracle_moment(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    edge: Tuple[int, int],
    f: MomentFunction,
    cap: int = DEFAULT_TREE_CAP,
) -> float:
    """Posterior moment of one edge weight by direct summation over trees.

    Trees are split on containment of the edge; the two parts weight the
    closed-form prior and one-step-updated Dirichlet moments.
    """
    lam = oracle_lambda(graph, prior, instance, edge, cap)
    k, j = edge
    pos = graph.child_position(k, j)
    m0 = prior_moment(prior.alpha[k], pos, f, incremented=False)
    m1 = prior_moment(prior.alpha[k], pos, f, incremented=True)
    return (1.0 - lam) * m0 + lam * m1


def oracle_moments_bulk(
    graph: SpnGraph,
    prior: DirichletPrior,
    instance: Instance,
    f: MomentFunction,
    cap: int = DEFAULT_TREE_CAP,
) -> Dict[Tuple[int, int], float]:
    """Posterior moments for every sum edge from a single enumeration."""
    z, mass = edge_tree_masses(graph, prior, instance, cap)
    if z == 0.0:
        raise ZeroEvidenceError("instance has zero probability under the prior means")
    out = {}
    for k in graph.sum_nodes():
        alpha = prior.alpha[k]
        for pos, j in enumerate(graph.children[k]):
            lam = mass[(k, j)] / z
            m0 = prior_moment(alpha, pos, f, incremented=False)
            m1 = prior_moment(alpha, pos, f, incremented=True)
            out[(k, j)] = (1.0 - lam) * m0 + lam * m1
    return out


# ---------------------------------------------------------------------------
# Random network generator
#
# Networks are built over a tree of scope regions.  A region is a set of
# variables plus a depth budget; internal regions split their scope into
# disjoint blocks (one "spine" block keeps enough variables to reach the
# requested depth exactly).  Every sum node over a region owns sum_fanout
# product children; each product references one sum per block region, and
# with probability dag_merge_probability that reference reuses an existing
# sum of the block (same scope, same level), creating a DAG.
# ---------------------------------------------------------------------------

@dataclass
class _Region:
    scope: Tuple[int, ...]
    budget: int
    var: Optional[int] = None
    blocks: Optional[List["_Region"]] = None
    sums: Optional[List[int]] = None


def generate_random_spn(
    seed: int,
    num_vars: int,
    depth: int,
    sum_fanout: int,
    product_fanout: int,
    dag_merge_probability: float,
    arity: int = 2,
    max_nodes: int = 2_000_000,
) -> SpnGraph:
    """Seeded complete-and-decomposable network with alternating sum and
    product levels and exactly ``depth`` sum layers on its deepest path.

    ``dag_merge_probability`` 0 yields a tree; higher values share
    same-scope sub-networks and create reconvergent DAGs.
    """
    if num_vars < 1 or depth < 1 or sum_fanout < 1 or arity < 2:
        raise GenerationError("num_vars, depth, sum_fanout must be >= 1 and arity >= 2")
    if not (0.0 <= dag_merge_probability <= 1.0):
        raise GenerationError("dag_merge_probability must be in [0, 1]")
    if num_vars > 1 and product_fanout < 2:
        raise GenerationError("product_fanout must be >= 2 for multi-variable scopes")

    rng = random.Random(seed)
    root_region = _Region(scope=tuple(range(num_vars)), budget=depth)
    _grow_region_tree(rng, root_region, product_fanout)

    builder = GraphBuilder()
    populate: deque = deque()

    def new_sum(region: _Region) -> int:
        nid = builder.add_sum()
        if region.sums is None:
            region.sums = []
        region.sums.append(nid)
        populate.append((region, nid))
        return nid

    def resolve(region: _Region) -> int:
        if region.sums and rng.random() < dag_merge_probability:
            return region.sums[rng.randrange(len(region.sums))]
        return new_sum(region)

    new_sum(root_region)
    while populate:
        region, nid = populate.popleft()
        if region.var is not None:
            weights = _dirichlet(rng, arity)
            for value in range(arity):
                leaf = builder.add_leaf(region.var, value)
                builder.add_edge(nid, leaf, weights[value])
        else:
            weights = _dirichlet(rng, sum_fanout)
            for i in range(sum_fanout):
                pid = builder.add_product()
                builder.add_edge(nid, pid, weights[i])
                for block in region.blocks:
                    builder.add_edge(pid, resolve(block))
        if builder.num_nodes > max_nodes:
            raise GenerationError(
                f"generation exceeded the {max_nodes}-node budget; "
                "raise dag_merge_probability or lower depth/fanout"
            )

    graph = builder.build(num_vars=num_vars)
    report = validate(graph)
    if not report.ok:
        raise RuntimeError(f"generator produced an invalid network: {report.violations}")
    return graph


def _grow_region_tree(rng: random.Random, root: _Region, pf: int):
    stack = [(root, True)]
    while stack:
        region, exact = stack.pop()
        n = len(region.scope)
        if n == 1:
            region.var = region.scope[0]
            continue
        if region.budget < 2:
            raise GenerationError(
                f"scope of {n} variables cannot terminate within depth budget {region.budget}"
            )
        sizes = _split_sizes(rng, n, region.budget, exact, pf)
        shuffled = rng.sample(region.scope, n)
        region.blocks = []
        start = 0
        for i, size in enumerate(sizes):
            block_scope = tuple(sorted(shuffled[start:start + size]))
            start += size
            block = _Region(scope=block_scope, budget=region.budget - 1)
            region.blocks.append(block)
            stack.append((block, exact and i == 0))


def _split_sizes(rng: random.Random, n: int, budget: int, exact: bool, pf: int) -> List[int]:
    cap = _capacity(pf, budget - 2, n)
    b = min(pf, n)
    sizes: List[int] = []
    remaining = n
    blocks_left = b
    if exact:
        low = max(budget - 1, remaining - (blocks_left - 1) * cap, 1)
        high = min(cap, remaining - (blocks_left - 1))
        if low > high:
            raise GenerationError(
                f"scope too small to split at requested depth "
                f"({n} variables, budget {budget}, product fanout {pf})"
            )
        s = rng.randint(low, high)
        sizes.append(s)
        remaining -= s
        blocks_left -= 1
    while blocks_left:
        low = max(1, remaining - (blocks_left - 1) * cap)
        high = min(cap, remaining - (blocks_left - 1))
        if low > high:
            raise GenerationError(
                f"scope too small to split at requested depth "
                f"({n} variables, budget {budget}, product fanout {pf})"
            )
        s = rng.randint(low, high)
        sizes.append(s)
        remaining -= s
        blocks_left -= 1
    return sizes


def _capacity(pf: int, levels: int, limit: int) -> int:
    """min(pf ** levels, limit) without forming huge powers."""
    if levels <= 0:
        return 1
    c = 1
    for _ in range(levels):
        c *= pf
        if c >= limit:
            return limit
    return c


def _dirichlet(rng: random.Random, k: int) -> List[float]:
    draws = [rng.expovariate(1.0) for _ in range(k)]
    total = math.fsum(draws)
    return [d / total for d in draws]


def sample_instances(
    graph: SpnGraph,
    weights: Mapping[int, Sequence[float]],
    count: int,
    seed: int,
    missing_probability: float = 0.0,
) -> List[Instance]:
    """Ancestral samples from the network distribution, optionally masking
    each variable to marginalized with the given probability."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        assignment: List[Optional[int]] = [None] * graph.num_vars
        stack = [graph.root]
        while stack:
            v = stack.pop()
            kind = graph.kinds[v]
            if kind is NodeKind.LEAF:
                assignment[graph.leaf_var[v]] = graph.leaf_value[v]
            elif kind is NodeKind.PRODUCT:
                stack.extend(graph.children[v])
            else:
                r = rng.random()
                acc = 0.0
                chosen = graph.children[v][-1]
                for pos, c in enumerate(graph.children[v]):
                    acc += weights[v][pos]
                    if r < acc:
                        chosen = c
                        break
                stack.append(chosen)
        if missing_probability > 0.0:
            for var in range(graph.num_vars):
                if rng.random() < missing_probability:
                    assignment[var] = None
        out.append(tuple(assignment))
    return out
