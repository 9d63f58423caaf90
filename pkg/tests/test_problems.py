"""Problem zoo tests: closed forms, continuity, Lipschitz modulus,
unbiasedness (exact, via the indicator probability 3/4), and backprop
correctness against finite differences and a hand-computed chain rule."""
import math
from fractions import Fraction

import numpy as np
import pytest

from poula.problems import make_problem
from poula.problems.mlp import forward, loss_and_grad, param_count
from poula.problems.motivating import (
    gradient_batch,
    lipschitz_bound,
    motivating_gradient,
    motivating_objective,
    motivating_true_gradient,
)
from poula.rng import make_rng


class TestMotivatingFormulas:
    def test_gradient_at_zero(self):
        assert motivating_gradient(0.0, -1.3) == 0.0
        assert motivating_gradient(0.0, 1.7) == 0.0

    def test_gradient_at_five(self):
        # oracle: 4 + 30*5^29 = 5587935447692871093754 (exact integer)
        exact = float(4 + 30 * 5**29)
        assert motivating_gradient(5.0, 0.0) == pytest.approx(exact, rel=1e-14)

    def test_gradient_at_half(self):
        # oracle: 1 + 30*2^-29 = 268435471/268435456 (x = 2 > 1, indicator 0)
        exact = float(Fraction(268435471, 268435456))
        assert motivating_gradient(0.5, 2.0) == pytest.approx(exact, rel=1e-14)

    def test_objective_values(self):
        assert motivating_objective(0.0) == 0.0
        assert motivating_objective(1.0) == pytest.approx(11.0 / 4.0, rel=1e-15)
        assert motivating_objective(2.0) == pytest.approx(2.0**30 + 21.0 / 4.0, rel=1e-15)

    def test_true_gradient_values(self):
        assert motivating_true_gradient(0.0) == 0.0
        assert motivating_true_gradient(1.0) == pytest.approx(67.0 / 2.0, rel=1e-15)
        assert motivating_true_gradient(-1.0) == pytest.approx(-67.0 / 2.0, rel=1e-15)

    def test_continuity_at_unit_boundary(self):
        # adjacent floats straddling the boundary: left/right limits agree to
        # machine precision (|u'|*2ulp and |u''|*2ulp respectively)
        for target in (1.0, -1.0):
            lo = np.nextafter(target, 0.0)
            hi = np.nextafter(target, 2.0 * target)
            assert motivating_objective(lo) == pytest.approx(
                motivating_objective(hi), abs=1e-12
            )
            assert motivating_true_gradient(lo) == pytest.approx(
                motivating_true_gradient(hi), abs=1e-12
            )

    def test_power_accuracy_against_exact_rationals(self):
        # documented accuracy target: relative 1e-12 on the high powers
        rng = make_rng(0)
        for _ in range(200):
            th = float(rng.uniform(-5.5, 5.5))
            frac = Fraction(th)
            exact_g = 30 * frac**29
            if abs(th) <= 1:
                exact_g += 2 * frac * 2  # x <= 1 branch
                got = motivating_gradient(th, 0.0)
            else:
                exact_g = 30 * frac**29 + 4 * (1 if th > 0 else -1)
                got = motivating_gradient(th, 0.0)
            assert got == pytest.approx(float(exact_g), rel=1e-12)

    def test_unbiasedness_exact(self):
        # E[1{X<=1}] = 3/4 for X ~ Uniform(-2,2); two-branch quadrature is
        # exact, so E[G(theta, X)] must equal u'(theta) up to rounding.
        rng = make_rng(1)
        for th in rng.uniform(-3, 3, size=500):
            le = motivating_gradient(float(th), 0.0)  # indicator = 1
            gt = motivating_gradient(float(th), 1.5)  # indicator = 0
            mean = 0.75 * le + 0.25 * gt
            assert mean == pytest.approx(motivating_true_gradient(float(th)), rel=1e-13)

    def test_local_lipschitz_bound(self):
        rng = make_rng(2)
        n = 100_000
        th = rng.uniform(-3, 3, size=n)
        thp = rng.uniform(-3, 3, size=n)
        xs = rng.uniform(-2, 2, size=n)
        lhs = np.abs(gradient_batch(th, xs) - gradient_batch(thp, xs))
        rhs = np.array([lipschitz_bound(a, b) for a, b in zip(th, thp)])
        assert np.all(lhs <= rhs)

    def test_problem_interface(self):
        prob = make_problem("motivating")
        assert prob.dim == 1
        assert prob.optimum_value() == 0.0
        gen = make_rng(3)
        xs = [prob.sample_data(gen) for _ in range(5000)]
        assert all(-2.0 <= x < 2.0 for x in xs)
        g = prob.gradient(np.array([0.5]), 2.0)
        assert g.shape == (1,)


class TestQuadratic:
    def test_gradient_and_objective(self):
        prob = make_problem("quadratic", a=1.0)
        assert prob.gradient(np.array([3.0]), None)[0] == 3.0
        assert prob.objective(np.array([2.0])) == pytest.approx(2.0, rel=1e-15)

    def test_gibbs_variance_closed_form(self):
        # pi_beta of a*z^2/2 is N(0, 1/(a*beta)); checked via the oracle in
        # test_diagnostics; here just the curvature scaling of the gradient.
        prob = make_problem("quadratic", a=2.0)
        assert prob.gradient(np.array([3.0]), None)[0] == 6.0

    def test_invalid_curvature(self):
        with pytest.raises(ValueError):
            make_problem("quadratic", a=0.0)

    def test_unknown_problem_name(self):
        with pytest.raises(ValueError):
            make_problem("nope")


class TestMLP:
    def test_zero_network_zero_targets(self):
        layers = [2, 3, 1]
        theta = np.zeros(param_count(layers))
        X = np.zeros((4, 2))
        y = np.zeros((4, 1))
        loss, g = loss_and_grad(theta, X, y, layers, "identity")
        assert loss == 0.0
        assert np.array_equal(g, np.zeros_like(g))

    def test_gradient_matches_finite_differences(self):
        layers = [8, 12, 4]
        assert param_count(layers) >= 100
        rng = make_rng(4)
        theta = 0.4 * rng.standard_normal(param_count(layers))
        X = rng.standard_normal((16, 8))
        y = rng.standard_normal((16, 4))
        loss, g = loss_and_grad(theta, X, y, layers, "tanh")
        coords = rng.choice(theta.size, size=100, replace=False)
        h = 1e-6
        for i in coords:
            e = np.zeros_like(theta)
            e[i] = h
            lp, _ = loss_and_grad(theta + e, X, y, layers, "tanh")
            lm, _ = loss_and_grad(theta - e, X, y, layers, "tanh")
            fd = (lp - lm) / (2 * h)
            assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-10)

    def test_hand_chain_rule_trace(self):
        # 1-2-1 tanh network, single datum; every quantity below is the
        # hand-applied chain rule, written out independently of the module.
        layers = [1, 2, 1]
        w11, w12, b11, b12 = 0.5, -0.3, 0.1, 0.2
        w21, w22, b2 = 0.7, -0.4, 0.05
        theta = np.array([w11, w12, b11, b12, w21, w22, b2])
        x, y = 0.8, 0.3

        z1 = x * w11 + b11
        z2 = x * w12 + b12
        h1, h2 = math.tanh(z1), math.tanh(z2)
        pred = h1 * w21 + h2 * w22 + b2
        resid = pred - y
        expected_loss = 0.5 * resid**2
        d1 = resid * w21 * (1 - math.tanh(z1) ** 2)
        d2 = resid * w22 * (1 - math.tanh(z2) ** 2)
        expected_grad = np.array(
            [x * d1, x * d2, d1, d2, resid * h1, resid * h2, resid]
        )

        loss, g = loss_and_grad(theta, np.array([[x]]), np.array([[y]]), layers, "tanh")
        assert loss == pytest.approx(expected_loss, rel=1e-14)
        np.testing.assert_allclose(g, expected_grad, rtol=1e-13)

    def test_problem_construction_and_determinism(self):
        p1 = make_problem("mlp", layers=[8, 16, 1], seed=9)
        p2 = make_problem("mlp", layers=[8, 16, 1], seed=9)
        theta = make_rng(5).standard_normal(p1.dim)
        assert p1.objective(theta) == p2.objective(theta)
        gen1, gen2 = make_rng(6), make_rng(6)
        idx1, idx2 = p1.sample_data(gen1), p2.sample_data(gen2)
        np.testing.assert_array_equal(idx1, idx2)
        np.testing.assert_array_equal(p1.gradient(theta, idx1), p2.gradient(theta, idx2))

    def test_forward_matches_teacher_shape(self):
        prob = make_problem("mlp", layers=[4, 8, 2], n_data=64, seed=1)
        assert prob.dim == param_count([4, 8, 2])
        theta = np.zeros(prob.dim)
        assert prob.objective(theta) > 0.0  # labels are nonzero

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            make_problem("mlp", layers=[4])
        with pytest.raises(ValueError):
            make_problem("mlp", layers=[4, 0, 1])
        with pytest.raises(ValueError):
            make_problem("mlp", layers=[4, 8, 1], activation="softplus")
        with pytest.raises(ValueError):
            make_problem("mlp", layers=[300, 300, 300])

    def test_relu_forward(self):
        # layout: [W1 row (w11, w12), b1, W2 column, b2]
        theta = np.array([1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0])
        pred, _, _ = forward(theta, np.array([[2.0]]), [1, 2, 1], "relu")
        # z = (2, -2) -> relu (2, 0) -> out = 2*1 + 0*1 = 2
        assert pred[0, 0] == 2.0
