"""Diagnostics tests: Gibbs oracle against Gaussian closed forms, Wasserstein
estimators against exhaustive couplings, the exact step-size ceiling, finite
differences, and the moment / excess-risk estimators."""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from poula.chains import run_theopoula_ensemble
from poula.diagnostics import (
    excess_risk_estimate,
    finite_diff_check,
    gibbs_oracle_build,
    lambda_max,
    moment_estimate,
    rate_sweep,
    w1_1d,
    w2_1d,
)
from poula.problems import make_problem
from poula.rng import make_rng
from poula.theopoula import HyperParams


def quad(z):
    return 0.5 * z**2


class TestGibbsOracle:
    def test_standard_gaussian(self):
        o = gibbs_oracle_build(quad, beta=1.0, lo=-8, hi=8)
        assert abs(o.mean()) < 1e-10
        assert o.variance() == pytest.approx(1.0, abs=1e-4)
        assert o.truncation_mass < 1e-6

    def test_beta_scales_variance(self):
        o = gibbs_oracle_build(quad, beta=4.0, lo=-8, hi=8)
        assert o.variance() == pytest.approx(0.25, abs=1e-4)

    def test_motivating_target_symmetric(self):
        from poula.problems.motivating import objective_batch

        o = gibbs_oracle_build(objective_batch, beta=10.0, lo=-3, hi=3)
        assert abs(o.mean()) < 1e-6

    def test_density_normalized_and_nonnegative(self):
        o = gibbs_oracle_build(quad, beta=2.0, lo=-6, hi=6)
        assert np.all(o.density >= 0)
        assert np.trapezoid(o.density, o.grid) == pytest.approx(1.0, abs=1e-8)
        assert o.cdf[0] == 0.0 and o.cdf[-1] == pytest.approx(1.0, abs=1e-12)

    def test_even_moments_match_gaussian(self):
        o = gibbs_oracle_build(quad, beta=1.0, lo=-10, hi=10, n_grid=2**15)
        assert o.moment(2) == pytest.approx(1.0, abs=1e-4)
        assert o.moment(4) == pytest.approx(3.0, abs=1e-3)
        assert abs(o.moment(1)) < 1e-8 and abs(o.moment(3)) < 1e-8

    def test_inverse_cdf_sampling(self):
        o = gibbs_oracle_build(quad, beta=1.0, lo=-8, hi=8)
        s = o.sample(200_000, make_rng(4))
        assert s.mean() == pytest.approx(0.0, abs=0.01)
        assert s.var() == pytest.approx(1.0, abs=0.02)
        strat = o.stratified_sample(10_000)
        assert strat.std() == pytest.approx(1.0, abs=1e-3)

    def test_large_objective_shift_no_underflow(self):
        o = gibbs_oracle_build(lambda z: quad(z) + 1e6, beta=1.0, lo=-8, hi=8)
        assert o.variance() == pytest.approx(1.0, abs=1e-4)

    def test_errors(self):
        with pytest.raises(ValueError):
            gibbs_oracle_build(quad, beta=0.0, lo=-8, hi=8)
        with pytest.raises(ValueError):
            gibbs_oracle_build(quad, beta=1.0, lo=-8, hi=8, n_grid=512)
        with pytest.raises(ValueError):
            gibbs_oracle_build(lambda z: np.full_like(z, np.nan), beta=1.0, lo=-8, hi=8)


class TestWasserstein:
    def test_identical_samples(self):
        a = np.array([0.3, -1.0, 2.0])
        assert w1_1d(a, a) == 0.0
        assert w2_1d(a, a) == 0.0

    def test_known_values(self):
        assert w1_1d([0, 1], [1, 2]) == pytest.approx(1.0, rel=1e-15)
        assert w1_1d([0], [3]) == 3.0
        assert w2_1d([0], [3]) == 3.0
        assert w2_1d([0, 0], [-1, 1]) == pytest.approx(1.0, rel=1e-15)

    def test_matches_brute_force_small(self):
        rng = make_rng(13)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            a = rng.standard_normal(n)
            b = rng.standard_normal(n)
            brute = min(
                float(np.mean(np.abs(a - b[list(p)])))
                for p in itertools.permutations(range(n))
            )
            assert w1_1d(a, b) == pytest.approx(brute, abs=1e-12)

    def test_order_monotonicity_and_triangle(self):
        rng = make_rng(14)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            a, b, c = (rng.standard_normal(n) * rng.uniform(0.5, 2) for _ in range(3))
            assert w1_1d(a, b) <= w2_1d(a, b) + 1e-12
            assert w1_1d(a, c) <= w1_1d(a, b) + w1_1d(b, c) + 1e-12

    def test_unequal_sizes_exact_quantile_integration(self):
        # {0,0} (two atoms of mass 1/2) vs {0,0,3} (three atoms of mass 1/3):
        # quantile functions differ only on (2/3, 1], where Qb = 3.
        assert w1_1d([0.0, 0.0], [0.0, 0.0, 3.0]) == pytest.approx(1.0, rel=1e-12)
        # duplicating the sample must not change the distance
        rng = make_rng(15)
        a = rng.standard_normal(8)
        b = rng.standard_normal(8)
        assert w1_1d(np.repeat(a, 3), b) == pytest.approx(w1_1d(a, b), rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            w1_1d([], [1.0])


class TestLambdaMax:
    def test_exact_value_r1(self):
        # oracle: C(24,12) = 2704156 exactly; eta = 0.5 gives
        # min(1, 1/(4096 * 2704156^2)) = 3.3386936262174024e-17
        assert math.comb(24, 12) == 2704156
        exact = Fraction(1, 2**14 * 2704156**2) / Fraction(1, 2) ** 2
        assert lambda_max(0.5, 1) == float(exact)
        assert lambda_max(0.5, 1) == pytest.approx(3.3386936262174024e-17, rel=0)

    def test_monotone_grid(self):
        etas = np.linspace(0.05, 0.95, 10)
        for r in range(5):
            vals = [lambda_max(float(e), r) for e in etas]
            assert all(a > b for a, b in zip(vals, vals[1:]))
        for e in etas:
            vals = [lambda_max(float(e), r) for r in range(5)]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_tiny_eta_overflows_to_inf(self):
        assert lambda_max(1e-300, 1) == math.inf

    def test_invalid(self):
        with pytest.raises(ValueError):
            lambda_max(0.0, 1)
        with pytest.raises(ValueError):
            lambda_max(-0.5, 1)


class TestFiniteDiff:
    def test_quadratic_near_exact(self):
        prob = make_problem("quadratic", a=1.7)
        rng = make_rng(16)
        for _ in range(5):
            err = finite_diff_check(prob, rng.uniform(-2, 2, size=1), h=1e-5, rng=rng)
            assert err < 1e-9

    def test_motivating(self):
        prob = make_problem("motivating")
        err = finite_diff_check(prob, np.array([0.5]), h=1e-6)
        assert err < 1e-6

    def test_mlp(self):
        prob = make_problem("mlp", layers=[4, 8, 1], seed=2)
        rng = make_rng(17)
        err = finite_diff_check(prob, 0.3 * rng.standard_normal(prob.dim), n_coords=20, rng=rng)
        assert err < 1e-5

    def test_bad_h(self):
        with pytest.raises(ValueError):
            finite_diff_check(make_problem("quadratic"), np.array([1.0]), h=0.0)


class TestMomentAndRisk:
    def test_constant_trajectory(self):
        traj = np.full((100, 1), 3.0)
        assert moment_estimate(traj, 2, 10) == pytest.approx(9.0, rel=1e-15)
        assert moment_estimate(traj, 1, 0) == pytest.approx(3.0, rel=1e-15)

    def test_two_point_symmetric(self):
        traj = np.array([-1.0, 1.0] * 50)
        assert moment_estimate(traj, 1, 0) == 1.0

    def test_burn_in_bounds(self):
        with pytest.raises(ValueError):
            moment_estimate(np.ones(10), 2, 10)

    def test_excess_risk_pinned_at_optimum(self):
        prob = make_problem("motivating")
        traj = np.zeros((50, 1))
        assert excess_risk_estimate(traj, prob, 5) == 0.0

    def test_excess_risk_constant_at_one(self):
        prob = make_problem("motivating")
        traj = np.ones((50, 1))
        assert excess_risk_estimate(traj, prob, 0) == pytest.approx(11.0 / 4.0, rel=1e-12)

    def test_excess_risk_requires_optimum(self):
        prob = make_problem("mlp", layers=[2, 3, 1])
        with pytest.raises(ValueError):
            excess_risk_estimate(np.zeros((10, prob.dim)), prob, 0)

    def test_quadratic_long_run_second_moment(self):
        # pi_beta second moment is 1/beta = 1; the time average over a long
        # chain after burn-in should land within 0.05.
        prob = make_problem("quadratic", a=1.0)
        hp = HyperParams(step_size=0.001, inverse_temperature=1.0, boost_floor=0.1)
        res = run_theopoula_ensemble(prob, hp, 0.0, 1_000_000, 1, seed=21, record_every=1)
        est = moment_estimate(res.record[:, 0], 2, burn_in=200_000)
        assert est == pytest.approx(1.0, abs=0.05)

    def test_quadratic_excess_risk_matches_gibbs_quadrature(self):
        # E_pi[u] = 1/(2*beta) = 0.05 at beta = 10 (oracle quadrature value)
        prob = make_problem("quadratic", a=1.0)
        o = gibbs_oracle_build(quad, beta=10.0, lo=-4, hi=4)
        gibbs_value = 0.5 * o.moment(2)
        assert gibbs_value == pytest.approx(0.05, abs=1e-5)
        hp = HyperParams(step_size=0.001, inverse_temperature=10.0, boost_floor=0.1)
        res = run_theopoula_ensemble(prob, hp, 0.0, 400_000, 1, seed=22, record_every=1)
        er = excess_risk_estimate(res.record[::10], prob, burn_in=8_000)
        assert er == pytest.approx(gibbs_value, abs=0.02)


class TestRateSweep:
    def test_single_value_single_row(self):
        prob = make_problem("quadratic", a=1.0)
        hp = HyperParams(step_size=0.1, inverse_temperature=1.0, boost_floor=0.1)
        res = rate_sweep(prob, hp, [0.1], chain_count=500, diffusion_time=5.0, seed=3)
        assert len(res.rows) == 1
        assert res.w1_slope is None
        assert res.rows[0].n_steps == 50

    def test_oracle_initialized_chains_hit_noise_floor(self):
        # chains started from oracle quantiles, almost-zero diffusion time:
        # the W1 to the oracle stays at the finite-sample floor measured by
        # an oracle-vs-oracle draw.
        prob = make_problem("quadratic", a=1.0)
        n = 4000
        o = gibbs_oracle_build(quad, beta=1.0, lo=-10, hi=10)
        rng = make_rng(23)
        floor = w1_1d(o.sample(n, rng), o.stratified_sample(n))
        hp = HyperParams(step_size=1e-4, inverse_temperature=1.0, boost_floor=0.1)
        start = o.sample(n, make_rng(24))
        res = run_theopoula_ensemble(prob, hp, start, 50, n, seed=25)
        drifted = w1_1d(res.final, o.stratified_sample(n))
        assert drifted <= 3.0 * floor

    def test_requires_1d(self):
        prob = make_problem("quadratic", a=1.0, dim=2)
        hp = HyperParams(step_size=0.1, inverse_temperature=1.0)
        with pytest.raises(ValueError):
            rate_sweep(prob, hp, [0.1], 10, 1.0)

    def test_empty_lambdas(self):
        prob = make_problem("quadratic", a=1.0)
        hp = HyperParams(step_size=0.1, inverse_temperature=1.0)
        with pytest.raises(ValueError):
            rate_sweep(prob, hp, [], 10, 1.0)
