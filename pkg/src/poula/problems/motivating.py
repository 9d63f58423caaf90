"""One-dimensional problem with a super-linearly growing stochastic gradient.

The objective is E[U(theta, X)] with X ~ Uniform(-2, 2) and

    U(theta, x) = theta^2 * (1 + 1{x<=1}) + theta^30          for |theta| <= 1
    U(theta, x) = (2|theta| - 1) * (1 + 1{x<=1}) + theta^30   for |theta| > 1

so the stochastic gradient mixes a bounded random part with a theta^29 term
that explodes away from the origin while staying only locally Lipschitz. The
unique minimizer is theta = 0 with value 0. Closed forms for the averaged
objective and its derivative are implemented below; since P(X <= 1) = 3/4,
u(theta) = theta^30 + (7/4)*theta^2 inside the unit interval and
theta^30 + (7/4)*(2|theta|-1) outside.

High powers are evaluated by binary squaring in extended precision (see
``numerics.ipow_extended``); relative error stays below 1e-12 everywhere.
"""
from __future__ import annotations

import numpy as np

from ..numerics import ipow
from .base import Problem

# Local Lipschitz modulus of the stochastic gradient: |G(a,x) - G(b,x)| is
# bounded by LIPSCHITZ_COEFF * (1 + |a| + |b|)**LIPSCHITZ_POWER * |a - b|.
LIPSCHITZ_COEFF = 34.0
LIPSCHITZ_POWER = 28

DATA_LOW = -2.0
DATA_HIGH = 2.0
INDICATOR_MEAN = 0.75  # P(X <= 1) for X ~ Uniform(-2, 2)


def gradient_batch(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorized stochastic gradient G(theta, x), one pair per entry.

    This is the reference arithmetic mirrored by the compiled kernel: all
    intermediates in extended precision, one final rounding to float64.
    """
    t = np.asarray(theta, dtype=np.longdouble)
    ind = np.where(np.asarray(x, dtype=np.float64) <= 1.0, np.longdouble(1.0), np.longdouble(0.0))
    t29 = ipow(t, 29)
    inner = 2.0 * t * (1.0 + ind) + 30.0 * t29
    outer = 2.0 * (1.0 + ind) * np.sign(t) + 30.0 * t29
    g = np.where(np.abs(t) <= 1.0, inner, outer)
    with np.errstate(over="ignore"):
        return np.asarray(g, dtype=np.float64)


def motivating_gradient(theta: float, x: float) -> float:
    """Stochastic gradient G(theta, x) at a scalar point."""
    return float(gradient_batch(np.asarray([theta]), np.asarray([x]))[0])


def objective_batch(theta: np.ndarray) -> np.ndarray:
    t = np.asarray(theta, dtype=np.longdouble)
    at = np.abs(t)
    t30 = ipow(t, 30)
    inner = t30 + 1.75 * (t * t)
    outer = t30 + 1.75 * (2.0 * at - 1.0)
    with np.errstate(over="ignore"):
        return np.asarray(np.where(at <= 1.0, inner, outer), dtype=np.float64)


def motivating_objective(theta: float) -> float:
    """Averaged objective u(theta), exact."""
    return float(objective_batch(np.asarray([theta]))[0])


def true_gradient_batch(theta: np.ndarray) -> np.ndarray:
    t = np.asarray(theta, dtype=np.longdouble)
    t29 = ipow(t, 29)
    inner = 30.0 * t29 + 3.5 * t
    outer = 30.0 * t29 + 3.5 * np.sign(t)
    with np.errstate(over="ignore"):
        return np.asarray(np.where(np.abs(t) <= 1.0, inner, outer), dtype=np.float64)


def motivating_true_gradient(theta: float) -> float:
    """Derivative u'(theta) of the averaged objective."""
    return float(true_gradient_batch(np.asarray([theta]))[0])


def lipschitz_bound(theta: float, theta_p: float) -> float:
    """Local Lipschitz majorant for |G(theta, x) - G(theta_p, x)|."""
    base = 1.0 + abs(theta) + abs(theta_p)
    return LIPSCHITZ_COEFF * float(ipow(base, LIPSCHITZ_POWER)) * abs(theta - theta_p)


def sample_datum(gen: np.random.Generator) -> float:
    # Half-open [-2, 2); a measure-zero convention choice.
    return float(gen.uniform(DATA_LOW, DATA_HIGH))


def make_motivating_problem() -> Problem:
    return Problem(
        name="motivating",
        dim=1,
        sample_data=sample_datum,
        gradient=lambda theta, x: gradient_batch(theta, np.full_like(np.asarray(theta, dtype=np.float64), x)),
        objective=lambda theta: motivating_objective(float(np.asarray(theta).reshape(-1)[0])),
        objective_exact=True,
        mean_gradient=lambda theta: true_gradient_batch(theta),
        optimum=(np.zeros(1), 0.0),
        growth_exponent=29.0,
    )
