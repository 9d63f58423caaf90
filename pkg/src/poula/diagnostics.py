"""Quantitative verification tools.

Ground truth for the Langevin targets comes from deterministic grid
quadrature of the unnormalized Gibbs density exp(-beta*u) (no MCMC, so
acceptance checks carry a single stochastic error source: the chains under
test). One-dimensional Wasserstein distances are computed exactly from order
statistics. The step-size ceiling implied by the regularization parameters
is evaluated in exact big-integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .problems.base import Problem

DEFAULT_GRID = 2**14


@dataclass
class GibbsOracle1D:
    """Tabulated density/CDF of pi_beta(dz) proportional to exp(-beta*u(z)).

    Densities are normalized so the trapezoid quadrature over the grid is
    exactly one; ``truncation_mass`` estimates the probability mass lying
    outside [lo, hi] (computed on a widened grid) and should be negligible
    for a well-chosen window.
    """

    grid: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    beta: float
    truncation_mass: float

    @property
    def lo(self) -> float:
        return float(self.grid[0])

    @property
    def hi(self) -> float:
        return float(self.grid[-1])

    def moment(self, p: int) -> float:
        """Quadrature of z^p against the density."""
        return float(np.trapezoid(self.grid**p * self.density, self.grid))

    def abs_moment(self, p: float) -> float:
        return float(np.trapezoid(np.abs(self.grid) ** p * self.density, self.grid))

    def mean(self) -> float:
        return self.moment(1)

    def variance(self) -> float:
        m = self.mean()
        return self.moment(2) - m * m

    def quantile(self, q) -> np.ndarray:
        """Inverse CDF by monotone interpolation of the table."""
        return np.interp(q, self.cdf, self.grid)

    def stratified_sample(self, n: int) -> np.ndarray:
        """Deterministic low-noise representation: quantiles at midpoints."""
        return self.quantile((np.arange(n) + 0.5) / n)

    def sample(self, n: int, gen: np.random.Generator) -> np.ndarray:
        return self.quantile(gen.uniform(0.0, 1.0, size=n))


def gibbs_oracle_build(
    u: Callable[[np.ndarray], np.ndarray],
    beta: float,
    lo: float,
    hi: float,
    n_grid: int = DEFAULT_GRID,
) -> GibbsOracle1D:
    """Tabulate the Gibbs measure of a scalar objective on [lo, hi].

    ``u`` must accept a vector of abscissae. The exponent is shifted by
    min(u) before exponentiation so arbitrarily large objectives cannot
    underflow the whole table.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    if n_grid < 1024:
        raise ValueError(f"n_grid must be >= 1024, got {n_grid}")

    grid = np.linspace(lo, hi, n_grid)
    vals = np.asarray(u(grid), dtype=np.float64)
    if vals.shape != grid.shape or not np.all(np.isfinite(vals)):
        raise ValueError("objective must be finite on the whole grid")
    shift = float(vals.min())
    raw = np.exp(-beta * (vals - shift))
    mass = float(np.trapezoid(raw, grid))
    if mass <= 0.0 or not math.isfinite(mass):
        raise ValueError("Gibbs density has no usable mass on the grid after shifting")

    # Tail estimate on half-width extensions either side, same spacing.
    pad = 0.5 * (hi - lo)
    step = grid[1] - grid[0]
    n_pad = max(16, int(round(pad / step)))
    left = np.linspace(lo - pad, lo, n_pad)
    right = np.linspace(hi, hi + pad, n_pad)
    with np.errstate(over="ignore", invalid="ignore"):
        tail = 0.0
        for ext in (left, right):
            ext_vals = np.asarray(u(ext), dtype=np.float64)
            ext_raw = np.exp(-beta * (np.where(np.isfinite(ext_vals), ext_vals, np.inf) - shift))
            tail += float(np.trapezoid(ext_raw, ext))
    truncation = tail / (mass + tail)

    density = raw / mass
    inner = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(grid))])
    cdf = inner / inner[-1]
    return GibbsOracle1D(grid=grid, density=density, cdf=cdf, beta=float(beta), truncation_mass=truncation)


def _as_sorted_1d(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return np.sort(arr)


def _wp_1d(a, b, p: int) -> float:
    a = _as_sorted_1d(a, "a")
    b = _as_sorted_1d(b, "b")
    n, m = a.size, b.size
    if n == m:
        d = np.abs(a - b)
        return float(np.mean(d**p) ** (1.0 / p))
    # Unequal sizes: exact quantile-function integration. Both empirical
    # quantile functions are step functions with breakpoints on multiples of
    # 1/n and 1/m; integrate |Qa - Qb|^p over the merged breakpoints using
    # integer arithmetic (denominator n*m) so no probability mass is lost to
    # rounding.
    edges = np.union1d(np.arange(1, n + 1) * m, np.arange(1, m + 1) * n)
    prev = 0
    total = 0.0
    for e in edges:
        ia = (int(e) + m - 1) // m - 1
        ib = (int(e) + n - 1) // n - 1
        total += (int(e) - prev) * abs(a[ia] - b[ib]) ** p
        prev = int(e)
    return float((total / (n * m)) ** (1.0 / p))


def w1_1d(a, b) -> float:
    """Order-1 Wasserstein distance between 1-D empirical measures.

    For equal sample counts this is the sorted-sample coupling
    mean|a_(i) - b_(i)|, which is exactly optimal in one dimension; unequal
    counts fall back to exact quantile-function integration.
    """
    return _wp_1d(a, b, 1)


def w2_1d(a, b) -> float:
    """Order-2 Wasserstein distance between 1-D empirical measures."""
    return _wp_1d(a, b, 2)


def lambda_max(reg_strength: float, reg_exponent: int) -> float:
    """Largest admissible step size for given regularization parameters.

    Computed as min(1/(4*eta^2), 1/(2^14 * eta^2 * C(8l, 4l)^2)) with
    l = 2r + 1, using exact rational arithmetic and an exact big-integer
    binomial coefficient; the result is the correctly rounded double, with
    +inf returned once the exact value exceeds the float range.
    """
    if not reg_strength > 0:
        raise ValueError(f"reg_strength must be > 0, got {reg_strength}")
    if reg_exponent < 0 or reg_exponent != int(reg_exponent):
        raise ValueError(f"reg_exponent must be a nonnegative integer, got {reg_exponent}")
    eta_sq = Fraction(reg_strength) ** 2
    l = 2 * int(reg_exponent) + 1
    binom = math.comb(8 * l, 4 * l)
    exact = min(Fraction(1) / (4 * eta_sq), Fraction(1) / (2**14 * eta_sq * binom**2))
    try:
        return float(exact)
    except OverflowError:
        return math.inf


def finite_diff_check(
    problem: Problem,
    theta: np.ndarray,
    h: float = 1e-5,
    n_coords: int = 20,
    rng: np.random.Generator | None = None,
) -> float:
    """Worst relative error of the analytic mean gradient vs central differences.

    Probes ``n_coords`` randomly chosen coordinates (all, when the dimension
    is small). Relative error uses a unit floor in the denominator so
    near-zero gradient coordinates are judged on absolute error.
    """
    if not h > 0:
        raise ValueError(f"h must be > 0, got {h}")
    if problem.mean_gradient is None or not problem.objective_exact:
        raise ValueError(f"problem {problem.name!r} has no exact objective/gradient pair")
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    d = theta.size
    if d <= n_coords:
        coords = np.arange(d)
    else:
        if rng is None:
            raise ValueError("rng is required when subsampling coordinates")
        coords = rng.choice(d, size=n_coords, replace=False)
    g = np.asarray(problem.mean_gradient(theta), dtype=np.float64).reshape(-1)
    worst = 0.0
    for i in coords:
        e = np.zeros(d)
        e[i] = h
        fd = (problem.objective(theta + e) - problem.objective(theta - e)) / (2.0 * h)
        err = abs(fd - g[i]) / max(1.0, abs(g[i]))
        worst = max(worst, err)
    return worst


def _traj_norms(traj: np.ndarray) -> np.ndarray:
    traj = np.asarray(traj, dtype=np.float64)
    if traj.ndim == 1:
        return np.abs(traj)
    return np.sqrt(np.sum(traj * traj, axis=1))


def moment_estimate(traj: np.ndarray, p: int, burn_in: int) -> float:
    """Time-average of |theta_n|^p over the post-burn-in window."""
    norms = _traj_norms(traj)
    if not 0 <= burn_in < norms.size:
        raise ValueError(f"burn_in {burn_in} leaves no samples out of {norms.size}")
    return float(np.mean(norms[burn_in:] ** p))


def excess_risk_estimate(traj: np.ndarray, problem: Problem, burn_in: int) -> float:
    """Time-averaged objective gap E[u(theta_n)] - u(theta*) after burn-in."""
    if problem.optimum is None:
        raise ValueError(f"problem {problem.name!r} has no known optimum")
    traj = np.asarray(traj, dtype=np.float64)
    if traj.ndim == 1:
        traj = traj[:, None]
    if not 0 <= burn_in < traj.shape[0]:
        raise ValueError(f"burn_in {burn_in} leaves no samples out of {traj.shape[0]}")
    vals = np.array([problem.objective(row) for row in traj[burn_in:]])
    return float(np.mean(vals) - problem.optimum_value())


@dataclass
class RateSweepRow:
    step_size: float
    n_steps: int
    w1: float
    w2: float


@dataclass
class RateSweepResult:
    rows: list[RateSweepRow]
    w1_slope: float | None
    w2_slope: float | None
    diffusion_time: float
    chain_count: int

    def w1_values(self) -> list[float]:
        return [r.w1 for r in self.rows]


def rate_sweep(
    problem: Problem,
    optimizer,
    step_sizes: Sequence[float],
    chain_count: int,
    diffusion_time: float,
    seed: int = 0,
    theta0: float = 0.0,
    oracle_window: tuple[float, float] = (-10.0, 10.0),
    n_grid: int = DEFAULT_GRID,
    backend: str = "auto",
) -> RateSweepResult:
    """Distance of the chain law at fixed diffusion time to the Gibbs target.

    For each step size lam, runs ``chain_count`` independent chains for
    round(diffusion_time/lam) steps, pools the endpoints, and measures W1/W2
    against an equal-size stratified sample of the Gibbs oracle. ``optimizer``
    is a template ``HyperParams``; its step size is replaced per sweep point.
    Expected behavior under the theory: distances shrink with lam at rate
    about sqrt(lam) once the exponential-in-time term is negligible.
    """
    from dataclasses import replace as _replace

    from .chains import run_theopoula_ensemble

    if problem.dim != 1:
        raise ValueError("rate_sweep requires a one-dimensional problem")
    if len(step_sizes) == 0:
        raise ValueError("step_sizes must be nonempty")

    def u_vec(z: np.ndarray) -> np.ndarray:
        return np.array([problem.objective(np.atleast_1d(v)) for v in z])

    oracle = gibbs_oracle_build(
        u_vec, optimizer.inverse_temperature, oracle_window[0], oracle_window[1], n_grid
    )
    reference = oracle.stratified_sample(chain_count)
    rows = []
    for k, lam in enumerate(step_sizes):
        n_steps = max(1, int(round(diffusion_time / lam)))
        hp = _replace(optimizer, step_size=float(lam))
        res = run_theopoula_ensemble(
            problem, hp, theta0, n_steps, chain_count, seed=seed + k, backend=backend
        )
        rows.append(
            RateSweepRow(
                step_size=float(lam),
                n_steps=n_steps,
                w1=w1_1d(res.final, reference),
                w2=w2_1d(res.final, reference),
            )
        )
    w1_slope = w2_slope = None
    if len(rows) >= 2:
        lx = np.log([r.step_size for r in rows])
        w1_slope = float(np.polyfit(lx, np.log([r.w1 for r in rows]), 1)[0])
        w2_slope = float(np.polyfit(lx, np.log([r.w2 for r in rows]), 1)[0])
    return RateSweepResult(
        rows=rows,
        w1_slope=w1_slope,
        w2_slope=w2_slope,
        diffusion_time=float(diffusion_time),
        chain_count=int(chain_count),
    )
