"""Numerical probes of the polygonal-gradient class conditions.

A step-size-indexed gradient map G_lam belongs to the class when (1) it grows
at most linearly in the iterate with a constant K_lam, (2) it deviates from
the raw stochastic gradient G by at most K2 * lam^gamma times a growth
factor, and (3) a drift-dominance expectation stays positive as |theta| grows.
None of this can be proven by sampling; the probe fits the constants on a
finite grid and Monte-Carlo sample and reports them as evidence. The fitted
symbols live only inside the report and are never asserted as exact values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rng import make_rng

CAVEAT = "statistical evidence, not proof"


@dataclass(frozen=True)
class ProbeSpec:
    """Probe design: where and how hard to sample.

    ``theta_values`` should include points with large |theta| -- the drift
    condition (property 3) is about the far field, and any finite probe of it
    is heuristic. ``growth_exp_data``/``growth_exp_theta`` are the exponents
    rho used to normalize the fits; they are probe inputs, not claims.
    """

    theta_values: tuple[float, ...]
    step_sizes: tuple[float, ...]
    n_samples: int = 2000
    delta: int = 2
    growth_exp_data: float = 0.0
    growth_exp_theta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if len(self.theta_values) == 0 or len(self.step_sizes) == 0 or self.n_samples < 1:
            raise ValueError("probe needs a nonempty theta grid, step sizes, and samples")
        if self.delta not in (1, 2):
            raise ValueError(f"delta must be 1 or 2, got {self.delta}")


@dataclass
class PropertyReport:
    """Fitted constants and Monte-Carlo estimates from one probe run."""

    k_lambda: dict[float, float]
    deviation: dict[float, float]
    gamma_fit: float | None
    k2_fit: float | None
    drift_estimates: dict[float, float]
    drift_theta: float
    drift_positive: bool
    caveat: str = field(default=CAVEAT)


def check_class_properties(
    transform: Callable[[np.ndarray, float, float], np.ndarray],
    gradient: Callable[[np.ndarray, float], np.ndarray],
    data_sampler: Callable[[np.random.Generator], float],
    spec: ProbeSpec,
) -> PropertyReport:
    """Probe a gradient map against the three class conditions.

    ``transform(theta, x, lam)`` is the map under test, ``gradient(theta, x)``
    the raw stochastic gradient it modifies, and ``data_sampler`` the datum
    distribution. Fits use the same sampled (theta, x) set for every step
    size so the per-lambda numbers are comparable.
    """
    gen = make_rng(spec.seed)
    thetas = [np.atleast_1d(np.asarray(t, dtype=np.float64)) for t in spec.theta_values]
    xs = [data_sampler(gen) for _ in range(spec.n_samples)]

    k_lambda: dict[float, float] = {}
    deviation: dict[float, float] = {}
    for lam in spec.step_sizes:
        k_best = 0.0
        d_best = 0.0
        for th in thetas:
            th_norm = float(np.sqrt(th @ th))
            for x in xs:
                g_lam = np.asarray(transform(th, x, lam), dtype=np.float64)
                g_raw = np.asarray(gradient(th, x), dtype=np.float64)
                mag = float(np.sqrt(g_lam @ g_lam))
                k_best = max(
                    k_best,
                    mag / ((1.0 + abs(x)) ** spec.growth_exp_data * (1.0 + th_norm)),
                )
                dev = float(np.linalg.norm(g_lam - g_raw))
                d_best = max(
                    d_best,
                    dev
                    / (
                        (1.0 + abs(x)) ** spec.growth_exp_data
                        * (1.0 + th_norm) ** spec.growth_exp_theta
                    ),
                )
        k_lambda[float(lam)] = k_best
        deviation[float(lam)] = d_best

    gamma_fit = k2_fit = None
    if len(spec.step_sizes) >= 2 and all(v > 0 for v in deviation.values()):
        lx = np.log(list(deviation.keys()))
        ly = np.log(list(deviation.values()))
        slope, intercept = np.polyfit(lx, ly, 1)
        gamma_fit, k2_fit = float(slope), float(np.exp(intercept))

    # Property 3 at the farthest probe point: the liminf is over
    # |theta| -> inf, so this finite evaluation is heuristic by construction.
    far = max(thetas, key=lambda t: float(np.sqrt(t @ t)))
    far_norm = float(np.sqrt(far @ far))
    drift: dict[float, float] = {}
    for lam in spec.step_sizes:
        acc = 0.0
        for x in xs:
            g_lam = np.asarray(transform(far, x, lam), dtype=np.float64)
            acc += float(far @ g_lam) / far_norm**spec.delta - (
                2.0 * lam / far_norm**spec.delta
            ) * float(g_lam @ g_lam)
        drift[float(lam)] = acc / len(xs)

    return PropertyReport(
        k_lambda=k_lambda,
        deviation=deviation,
        gamma_fit=gamma_fit,
        k2_fit=k2_fit,
        drift_estimates=drift,
        drift_theta=far_norm,
        drift_positive=all(v > 0 for v in drift.values()),
    )


def theopoula_transform(
    gradient: Callable[[np.ndarray, float], np.ndarray],
    boost_floor: float,
    reg_strength: float = 0.0,
    reg_exponent: int = 1,
):
    """Adapter: the tamed-boosted drift of a given raw gradient, as a
    class-probe transform ``(theta, x, lam) -> G_lam(theta, x)``."""
    from .theopoula import HyperParams, theopoula_gradient

    def transform(theta: np.ndarray, x: float, lam: float) -> np.ndarray:
        hp = HyperParams(
            step_size=lam,
            boost_floor=boost_floor,
            reg_strength=reg_strength,
            reg_exponent=reg_exponent,
        )
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        g = np.atleast_1d(np.asarray(gradient(theta, x), dtype=np.float64))
        return theopoula_gradient(theta, g, hp)

    return transform
