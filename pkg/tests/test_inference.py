import math

import pytest

from spnmoments import (
    count_induced_trees,
    differentiate,
    enumerate_trees,
    evaluate,
    generate_random_spn,
    log_likelihood,
    parse_model,
)
from spnmoments.inference import NEG_INF

from conftest import random_graph, random_instances, rel_err

MARGINAL = (None, None)


class TestEvaluate:
    def test_s2_hand_values(self, s2):
        trace = evaluate(s2, s2.sum_weights, (0, 1))
        expected = {3: 0.3, 4: 0.4, 5: 0.8, 1: 0.12, 2: 0.24, 0: 0.18}
        for node, value in expected.items():
            assert trace.value(node) == pytest.approx(value, rel=1e-12)

    def test_s1_marginalized_normalizes_to_one(self, s1):
        trace = evaluate(s1, s1.sum_weights, MARGINAL)
        assert trace.value(0) == pytest.approx(1.0, rel=1e-12)

    def test_s1_hand_values(self, s1):
        trace = evaluate(s1, s1.sum_weights, (0, 0))
        assert trace.value(1) == 1.0
        assert trace.value(2) == 0.0
        assert trace.value(0) == pytest.approx(0.4, rel=1e-12)

    def test_hand_values_match_oracle(self, s1, s2):
        from spnmoments import oracle_polynomial

        assert oracle_polynomial(s1, s1.sum_weights, (0, 0)) == pytest.approx(0.4)
        assert oracle_polynomial(s2, s2.sum_weights, (0, 1)) == pytest.approx(0.18)

    def test_weight_shape_mismatch(self, s1):
        with pytest.raises(ValueError, match="length"):
            evaluate(s1, {0: (0.4, 0.3, 0.3)}, (0, 0))

    def test_missing_weight_vector(self, s2):
        weights = dict(s2.sum_weights)
        del weights[3]
        with pytest.raises(ValueError, match="missing weight vector"):
            evaluate(s2, weights, (0, 0))

    def test_negative_weight_rejected(self, s1):
        with pytest.raises(ValueError, match="negative weight"):
            evaluate(s1, {0: (-0.1, 1.1)}, (0, 0))

    def test_instance_length_checked(self, s1):
        with pytest.raises(ValueError, match="variables"):
            evaluate(s1, s1.sum_weights, (0,))

    def test_zero_weight_allowed(self, s1):
        trace = evaluate(s1, {0: (1.0, 0.0)}, (0, 0))
        assert trace.value(0) == pytest.approx(1.0)

    def test_each_edge_visited_once(self, s2):
        trace = evaluate(s2, s2.sum_weights, (0, 1))
        assert trace.eval_edge_visits == s2.num_edges
        differentiate(s2, trace)
        assert trace.diff_edge_visits == s2.num_edges


class TestDifferentiate:
    def test_root_derivative_is_one(self, s1, s2):
        for g in (s1, s2):
            trace = differentiate(g, evaluate(g, g.sum_weights, (0, 0)))
            assert trace.deriv(g.root) == 1.0

    def test_s2_shared_node_derivative(self, s2):
        trace = differentiate(s2, evaluate(s2, s2.sum_weights, (0, 1)))
        # both products feed node 3: 0.5*0.4 + 0.5*0.8
        assert trace.deriv(3) == pytest.approx(0.6, rel=1e-12)

    def test_s1_hand_values(self, s1):
        trace = differentiate(s1, evaluate(s1, s1.sum_weights, (0, 0)))
        assert trace.deriv(1) == pytest.approx(0.4, rel=1e-12)
        assert trace.deriv(2) == pytest.approx(0.6, rel=1e-12)

    def test_requires_matching_graph(self, s1, s2):
        trace = evaluate(s1, s1.sum_weights, (0, 0))
        with pytest.raises(ValueError, match="different graph"):
            differentiate(s2, trace)

    def test_zero_value_children_handled(self, s1):
        # product 2 has a zero child under x=(0,0); derivatives stay finite
        trace = differentiate(s1, evaluate(s1, s1.sum_weights, (0, 0)))
        assert trace.deriv(5) == 0.0
        assert trace.deriv(6) == pytest.approx(0.6 * 0.0, abs=1e-300)

    def test_two_zero_children(self):
        g = parse_model(
            "node 0 prod\nnode 1 leaf 0 1\nnode 2 leaf 1 1\nnode 3 leaf 2 0\n"
            "edge 0 1\nedge 0 2\nedge 0 3\n"
        )
        trace = differentiate(g, evaluate(g, {}, (0, 0, 0)))
        # with two zero-valued siblings every derivative below the root is 0
        assert all(trace.deriv(v) == 0.0 for v in (1, 2, 3))


def _perturbed(weights, node, pos, value):
    new = {k: list(ws) for k, ws in weights.items()}
    new[node][pos] = value
    return {k: tuple(ws) for k, ws in new.items()}


class TestPolynomialProperties:
    def test_oracle_equivalence_on_random_graphs(self):
        from spnmoments import oracle_polynomial

        for i in range(6):
            g = random_graph(i)
            assert count_induced_trees(g) <= 5000
            for instance in random_instances(g, 100, seed=i):
                fast = evaluate(g, g.sum_weights, instance).value(g.root)
                slow = oracle_polynomial(g, g.sum_weights, instance)
                assert rel_err(fast, slow) <= 1e-12

    def test_multilinearity_three_point_collinearity(self):
        # for each single weight coordinate the root value is affine, even
        # with unnormalized weights
        for i in range(4):
            g = random_graph(i)
            instance = random_instances(g, 1, seed=50 + i)[0]
            for k in g.sum_nodes():
                for pos in range(len(g.children[k])):
                    a, b = 0.2, 1.7
                    va = evaluate(g, _perturbed(g.sum_weights, k, pos, a), instance).value(g.root)
                    vm = evaluate(
                        g, _perturbed(g.sum_weights, k, pos, (a + b) / 2), instance
                    ).value(g.root)
                    vb = evaluate(g, _perturbed(g.sum_weights, k, pos, b), instance).value(g.root)
                    assert rel_err(vm, (va + vb) / 2.0) <= 1e-10

    def test_gradient_matches_finite_differences(self):
        for i in range(5):
            g = random_graph(i)
            for instance in random_instances(g, 4, seed=80 + i):
                trace = differentiate(g, evaluate(g, g.sum_weights, instance))
                root_value = trace.value(g.root)
                for k in g.sum_nodes():
                    for pos, child in enumerate(g.children[k]):
                        w = g.sum_weights[k][pos]
                        h = 1e-6 * max(1.0, abs(w))
                        up = evaluate(
                            g, _perturbed(g.sum_weights, k, pos, w + h), instance
                        ).value(g.root)
                        down = evaluate(
                            g, _perturbed(g.sum_weights, k, pos, w - h), instance
                        ).value(g.root)
                        fd = (up - down) / (2.0 * h)
                        analytic = trace.deriv(k) * trace.value(child)
                        if analytic == 0.0:
                            assert abs(fd) <= 1e-9 * max(1.0, root_value)
                        else:
                            assert rel_err(fd, analytic) <= 1e-6


class TestLogLikelihood:
    def test_s1_values(self, s1):
        assert log_likelihood(s1, s1.sum_weights, (0, 0)) == pytest.approx(
            math.log(0.4), rel=1e-12
        )
        assert log_likelihood(s1, s1.sum_weights, (0, 1)) == NEG_INF
        assert log_likelihood(s1, s1.sum_weights, MARGINAL) == pytest.approx(0.0, abs=1e-12)

    def test_unnormalized_weights_normalize(self, s1):
        weights = {0: (0.8, 1.2)}
        ll = log_likelihood(s1, weights, (0, 0))
        assert ll == pytest.approx(math.log(0.8 / 2.0), rel=1e-12)


class TestTreeCount:
    def test_single_leaf(self):
        g = parse_model("node 0 leaf 0 0\n")
        assert count_induced_trees(g) == 1

    def test_fixtures(self, s1, s2):
        assert count_induced_trees(s1) == 2
        assert count_induced_trees(s2) == 8

    def test_matches_enumeration(self, s1, s2):
        for g in (s1, s2):
            assert count_induced_trees(g) == len(enumerate_trees(g))
        for i in range(4):
            g = random_graph(i)
            assert count_induced_trees(g) == len(enumerate_trees(g))

    def test_exact_big_integer_on_deep_network(self):
        g = generate_random_spn(seed=3, num_vars=41, depth=40, sum_fanout=2,
                                product_fanout=2, dag_merge_probability=1.0)
        tau = count_induced_trees(g)
        assert isinstance(tau, int)
        assert tau > 2 ** 40  # far beyond float precision territory
