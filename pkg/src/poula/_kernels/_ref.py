"""Pure-numpy chain kernel: the reference semantics for the compiled backend.

``theopoula_chunk`` advances every chain of a one-dimensional problem by a
block of steps, vectorized across chains. The compiled kernel in _core.pyx
reproduces this arithmetic operation-for-operation (same expression grouping,
same extended-precision power algorithm), so the two backends produce
bit-identical trajectories from the same random blocks.
"""
from __future__ import annotations

import numpy as np

from ..numerics import ipow
from ..problems.motivating import gradient_batch
from ..theopoula import tamed_boosted_coord

GRAD_MOTIVATING = 0
GRAD_QUADRATIC = 1

name = "python"


def theopoula_chunk(
    theta: np.ndarray,
    xs: np.ndarray | None,
    zs: np.ndarray | None,
    n_steps: int,
    lam: float,
    boost_floor: float,
    reg_strength: float,
    reg_exponent: int,
    noise_scale: float,
    grad_kind: int,
    grad_a: float,
    record: np.ndarray | None,
) -> np.ndarray:
    """Advance ``theta`` (one entry per chain) ``n_steps`` steps in place.

    ``xs``/``zs`` hold one row of data draws / normal draws per step (zs may
    be None in noise-off mode, xs may be None for data-free problems).
    ``record``, when given, receives the iterate after every step.
    """
    s = np.sqrt(lam)
    for i in range(n_steps):
        if grad_kind == GRAD_MOTIVATING:
            g = gradient_batch(theta, xs[i])
        else:
            g = grad_a * theta
        h = tamed_boosted_coord(g, lam, boost_floor)
        if reg_strength > 0.0:
            # One-dimensional chains: the iterate norm is just |theta|.
            anorm = np.abs(theta)
            with np.errstate(over="ignore", invalid="ignore"):
                pow_norm = ipow(anorm, 2 * reg_exponent)
                tamed_reg = reg_strength * theta * pow_norm / (1.0 + s * pow_norm)
            h = h + np.where(np.isinf(pow_norm), reg_strength * theta / s, tamed_reg)
        theta = theta - lam * h
        if zs is not None:
            theta = theta + noise_scale * zs[i]
        if record is not None:
            record[i] = theta
    return theta
