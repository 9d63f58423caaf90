"""Quadratic objective u(theta) = a*|theta|^2/2 with a deterministic gradient.

The Gibbs measure exp(-beta*u)/Z is an isotropic Gaussian with per-coordinate
variance 1/(a*beta), which makes this the canonical target for checking
sampler fidelity against closed forms.
"""
from __future__ import annotations

import numpy as np

from .base import Problem


def make_quadratic_problem(a: float = 1.0, dim: int = 1) -> Problem:
    if not a > 0:
        raise ValueError(f"curvature must satisfy a > 0, got {a}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    a = float(a)

    def gradient(theta, _x):
        return a * np.asarray(theta, dtype=np.float64)

    def objective(theta):
        theta = np.asarray(theta, dtype=np.float64)
        return 0.5 * a * float(theta @ theta)

    return Problem(
        name="quadratic",
        dim=dim,
        sample_data=lambda gen: None,  # degenerate data distribution
        gradient=gradient,
        objective=objective,
        objective_exact=True,
        mean_gradient=lambda theta: a * np.asarray(theta, dtype=np.float64),
        optimum=(np.zeros(dim), 0.0),
        growth_exponent=1.0,
        params={"a": a},
    )
