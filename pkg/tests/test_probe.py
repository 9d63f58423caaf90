"""Class-condition probe tests: fitted growth constants stay under the
per-coordinate cap, an identity transform shows zero deviation, and the
drift-dominance estimate is positive far from the origin."""
import math

import numpy as np
import pytest

from poula.probe import CAVEAT, ProbeSpec, check_class_properties, theopoula_transform
from poula.problems.motivating import motivating_gradient, sample_datum


def raw_gradient(theta, x):
    return np.atleast_1d(motivating_gradient(float(np.asarray(theta).reshape(-1)[0]), x))


SPEC = ProbeSpec(
    theta_values=(0.0, 0.5, 1.0, 5.0, 25.0, 100.0),
    step_sizes=(0.1, 0.05, 0.01),
    n_samples=500,
    delta=2,
    seed=3,
)


class TestTheoPoulaProbe:
    def test_k_lambda_under_coordinate_cap(self):
        transform = theopoula_transform(raw_gradient, boost_floor=0.1)
        report = check_class_properties(transform, raw_gradient, sample_datum, SPEC)
        for lam, k in report.k_lambda.items():
            cap = math.sqrt(1) * (1.0 / math.sqrt(lam) + math.sqrt(lam))
            assert k <= cap * (1 + 1e-12)

    def test_drift_positive_far_field(self):
        # at |theta| = 100 the drift-dominance estimate is positive for every
        # probed step size (delta = 2)
        transform = theopoula_transform(raw_gradient, boost_floor=0.1)
        report = check_class_properties(transform, raw_gradient, sample_datum, SPEC)
        assert report.drift_theta == 100.0
        assert report.drift_positive
        assert all(v > 0 for v in report.drift_estimates.values())
        assert report.caveat == CAVEAT

    def test_deviation_scaling_in_small_step_regime(self):
        # the lam^gamma deviation order is visible once sqrt(lam)*|G| << 1;
        # on the unit-interval grid the fitted exponent sits near 1/2
        spec = ProbeSpec(
            theta_values=(0.0, 0.25, 0.5, 0.75, 1.0),
            step_sizes=(1e-4, 1e-5, 1e-6),
            n_samples=300,
            seed=3,
        )
        transform = theopoula_transform(raw_gradient, boost_floor=0.1)
        report = check_class_properties(transform, raw_gradient, sample_datum, spec)
        devs = [report.deviation[lam] for lam in sorted(report.deviation)]
        assert all(a < b for a, b in zip(devs, devs[1:]))
        assert report.gamma_fit == pytest.approx(0.5, abs=0.15)


class TestIdentityTransform:
    def test_bounded_identity_has_zero_deviation(self):
        def bounded_gradient(theta, x):
            return np.atleast_1d(np.tanh(np.asarray(theta, dtype=np.float64)))

        def identity(theta, x, lam):
            return bounded_gradient(theta, x)

        report = check_class_properties(identity, bounded_gradient, sample_datum, SPEC)
        assert all(v == 0.0 for v in report.deviation.values())
        assert report.gamma_fit is None and report.k2_fit is None


class TestProbeSpecValidation:
    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            ProbeSpec(theta_values=(), step_sizes=(0.1,))

    def test_empty_lambdas_rejected(self):
        with pytest.raises(ValueError):
            ProbeSpec(theta_values=(1.0,), step_sizes=())

    def test_bad_delta_rejected(self):
        with pytest.raises(ValueError):
            ProbeSpec(theta_values=(1.0,), step_sizes=(0.1,), delta=3)
