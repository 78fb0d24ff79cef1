import random

import pytest

from spnmoments import DirichletPrior, parse_model
from spnmoments.oracle import generate_random_spn

S1_TEXT = """\
# mixture of two product distributions over two binary variables
node 0 sum
node 1 prod
node 2 prod
node 3 leaf 0 0
node 4 leaf 1 0
node 5 leaf 0 1
node 6 leaf 1 1
edge 0 1 0.4
edge 0 2 0.6
edge 1 3
edge 1 4
edge 2 5
edge 2 6
"""

# DAG: sum node 3 is shared by both products
S2_TEXT = """\
node 0 sum
node 1 prod
node 2 prod
node 3 sum
node 4 sum
node 5 sum
node 6 leaf 0 0
node 7 leaf 0 1
node 8 leaf 1 0
node 9 leaf 1 1
edge 0 1 0.5
edge 0 2 0.5
edge 1 3
edge 1 4
edge 2 3
edge 2 5
edge 3 6 0.3
edge 3 7 0.7
edge 4 8 0.6
edge 4 9 0.4
edge 5 8 0.2
edge 5 9 0.8
"""


@pytest.fixture(scope="session")
def s1():
    return parse_model(S1_TEXT)


@pytest.fixture(scope="session")
def s2():
    return parse_model(S2_TEXT)


@pytest.fixture(scope="session")
def s2_weight_prior(s2):
    """Prior whose Dirichlet means reproduce the S2 fixture weights."""
    return DirichletPrior({k: s2.sum_weights[k] for k in s2.sum_nodes()})


def rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


def random_instances(graph, count, seed, missing_probability=0.25):
    """Uniform random instances, each variable marginalized with the given
    probability."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        row = []
        for var in range(graph.num_vars):
            if rng.random() < missing_probability:
                row.append(None)
            else:
                row.append(rng.randrange(graph.arities[var]))
        out.append(tuple(row))
    return out


def random_prior(graph, seed):
    """Random positive hyperparameters in [0.3, 4.0], one vector per sum node."""
    rng = random.Random(seed)
    return DirichletPrior({
        k: tuple(rng.uniform(0.3, 4.0) for _ in graph.children[k])
        for k in graph.sum_nodes()
    })


# (num_vars, depth, sum_fanout, product_fanout) combinations satisfying
# depth <= num_vars <= product_fanout ** (depth - 1)
FEASIBLE_PARAMS = [
    (2, 2, 2, 2),
    (3, 3, 2, 2),
    (4, 3, 2, 2),
    (4, 3, 3, 2),
    (5, 4, 2, 2),
    (6, 4, 2, 3),
    (3, 2, 2, 3),
    (6, 3, 2, 3),
]


def random_graph(i, merge=None):
    """Small deterministic network #i; alternates trees and DAGs by default."""
    num_vars, depth, sf, pf = FEASIBLE_PARAMS[i % len(FEASIBLE_PARAMS)]
    if merge is None:
        merge = 0.5 if i % 2 else 0.0
    return generate_random_spn(
        seed=100 + i, num_vars=num_vars, depth=depth, sum_fanout=sf,
        product_fanout=pf, dag_merge_probability=merge,
    )


def realized_sum_depth(graph):
    """Maximum number of sum nodes on any root-to-leaf path."""
    depth = [0] * graph.num_nodes
    for v in graph.topo_order:
        best = max((depth[c] for c in graph.children[v]), default=0)
        depth[v] = best + (1 if graph.is_sum(v) else 0)
    return depth[graph.root]
