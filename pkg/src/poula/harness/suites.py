"""Property suites behind the ``diagnose`` CLI verb.

Each check re-derives an expected behavior from an independent route
(closed forms, exhaustive couplings, Monte-Carlo probes of proved bounds) and
compares the library against it at desk scale. The suite is fast (seconds)
and fully seeded.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..diagnostics import (
    finite_diff_check,
    gibbs_oracle_build,
    lambda_max,
    w1_1d,
    w2_1d,
)
from ..probe import ProbeSpec, check_class_properties, theopoula_transform
from ..problems import make_problem
from ..problems.motivating import (
    gradient_batch,
    lipschitz_bound,
    motivating_gradient,
    sample_datum,
)
from ..rng import make_rng
from ..theopoula import HyperParams, drift_norm_bound, tamed_boosted_coord, theopoula_gradient


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)  # numpy bools are not JSON-serializable


def _coordinate_bound(rng: np.random.Generator, n: int = 100_000) -> CheckResult:
    lam = 10.0 ** rng.uniform(-4, 0, size=n)
    eps = 10.0 ** rng.uniform(-3, 1, size=n)
    g = rng.standard_normal(n) * 10.0 ** rng.uniform(0, 12, size=n)
    worst_margin = math.inf
    violations = 0
    for gi, li, ei in zip(g, lam, eps):
        bound = 1.0 / math.sqrt(li) + math.sqrt(li)
        val = abs(tamed_boosted_coord(float(gi), float(li), float(ei)))
        worst_margin = min(worst_margin, bound - val)
        violations += val > bound
    return CheckResult(
        "coordinate_bound",
        violations == 0,
        f"{n} samples, violations={violations}, smallest slack={worst_margin:.3e}",
    )


def _odd_symmetry(rng: np.random.Generator, n: int = 2000) -> CheckResult:
    g = rng.standard_normal(n) * 10.0 ** rng.uniform(-6, 6, size=n)
    worst = 0.0
    for gi in g:
        a = tamed_boosted_coord(float(gi), 0.01, 0.1)
        b = tamed_boosted_coord(-float(gi), 0.01, 0.1)
        worst = max(worst, abs(a + b))
    return CheckResult("odd_symmetry", worst == 0.0, f"max |f(g)+f(-g)| = {worst:.3e}")


def _slope_and_saturation() -> CheckResult:
    lam, eps = 0.01, 0.1
    target = 1.0 + math.sqrt(lam) / eps
    slope = tamed_boosted_coord(1e-9, lam, eps) / 1e-9
    slope_ok = target * (1 - 1e-3) <= slope <= target
    sat = tamed_boosted_coord(1e12, lam, eps)
    sat_ok = abs(sat - 1.0 / math.sqrt(lam)) <= 1e-4 / math.sqrt(lam)
    return CheckResult(
        "boost_slope_and_saturation",
        slope_ok and sat_ok,
        f"slope={slope:.8f} (target {target}), saturation={sat:.6f}",
    )


def _drift_norm_bound(rng: np.random.Generator, n: int = 20_000) -> CheckResult:
    violations = 0
    for _ in range(n):
        d = int(rng.integers(1, 6))
        hp = HyperParams(
            step_size=float(10.0 ** rng.uniform(-3, 0)),
            boost_floor=float(10.0 ** rng.uniform(-2, 1)),
            reg_strength=float(rng.uniform(0, 0.99)),
            reg_exponent=int(rng.integers(1, 4)),
        )
        theta = rng.standard_normal(d) * 10.0 ** rng.uniform(-1, 2)
        g = rng.standard_normal(d) * 10.0 ** rng.uniform(0, 10)
        h = theopoula_gradient(theta, g, hp)
        bound = drift_norm_bound(hp, d, float(np.sqrt(theta @ theta)))
        violations += float(h @ h) > bound * (1 + 1e-12)
    return CheckResult("drift_norm_bound", violations == 0, f"{n} samples, violations={violations}")


def _wasserstein_checks(rng: np.random.Generator) -> CheckResult:
    ok = True
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        brute = min(
            float(np.mean(np.abs(a - b[list(perm)])))
            for perm in itertools.permutations(range(n))
        )
        diff = abs(w1_1d(a, b) - brute)
        worst = max(worst, diff)
        ok = ok and diff <= 1e-12
    for _ in range(100):
        n = int(rng.integers(1, 50))
        a, b, c = (rng.standard_normal(n) for _ in range(3))
        ok = ok and w1_1d(a, b) <= w2_1d(a, b) + 1e-12
        ok = ok and w1_1d(a, c) <= w1_1d(a, b) + w1_1d(b, c) + 1e-12
    return CheckResult("wasserstein_estimators", ok, f"worst brute-force gap {worst:.3e}")


def _lambda_max_checks() -> CheckResult:
    exact = lambda_max(0.5, 1)
    expected = min(1.0, 1.0 / (2**14 * 0.25 * math.comb(24, 12) ** 2))
    etas = np.linspace(0.05, 0.95, 10)
    rs = range(5)
    monotone = True
    for r in rs:
        vals = [lambda_max(float(e), r) for e in etas]
        monotone = monotone and all(a > b for a, b in zip(vals, vals[1:]))
    for e in etas:
        vals = [lambda_max(float(e), r) for r in rs]
        monotone = monotone and all(a > b for a, b in zip(vals, vals[1:]))
    return CheckResult(
        "lambda_max",
        exact == expected and monotone,
        f"lambda_max(0.5,1)={exact:.6e}, strictly decreasing on the grid: {monotone}",
    )


def _finite_difference(rng: np.random.Generator) -> CheckResult:
    worst = {}
    for name, kwargs in [
        ("quadratic", {"a": 2.0}),
        ("motivating", {}),
        ("mlp", {"layers": [4, 8, 1], "seed": 11}),
    ]:
        problem = make_problem(name, **kwargs)
        errs = []
        for _ in range(5):
            theta = rng.uniform(-0.8, 0.8, size=problem.dim)
            errs.append(finite_diff_check(problem, theta, h=1e-5, n_coords=20, rng=rng))
        worst[name] = max(errs)
    ok = all(v < 1e-5 for v in worst.values())
    return CheckResult("finite_difference", ok, f"max rel err per problem: {worst}")


def _lipschitz(rng: np.random.Generator, n: int = 100_000) -> CheckResult:
    th = rng.uniform(-3, 3, size=n)
    thp = rng.uniform(-3, 3, size=n)
    xs = rng.uniform(-2, 2, size=n)
    lhs = np.abs(gradient_batch(th, xs) - gradient_batch(thp, xs))
    rhs = np.array([lipschitz_bound(a, b) for a, b in zip(th, thp)])
    violations = int(np.sum(lhs > rhs))
    return CheckResult("local_lipschitz", violations == 0, f"{n} triples, violations={violations}")


def _gibbs_oracle() -> CheckResult:
    o1 = gibbs_oracle_build(lambda z: 0.5 * z**2, beta=1.0, lo=-8, hi=8)
    o4 = gibbs_oracle_build(lambda z: 0.5 * z**2, beta=4.0, lo=-8, hi=8)
    ok = (
        abs(o1.variance() - 1.0) < 1e-4
        and abs(o4.variance() - 0.25) < 1e-4
        and abs(o1.mean()) < 1e-8
        and o1.truncation_mass < 1e-6
    )
    return CheckResult(
        "gibbs_oracle",
        ok,
        f"var(beta=1)={o1.variance():.6f}, var(beta=4)={o4.variance():.6f}, "
        f"truncation={o1.truncation_mass:.2e}",
    )


def _class_properties() -> CheckResult:
    spec = ProbeSpec(
        theta_values=(0.0, 0.5, 1.0, 5.0, 25.0, 100.0),
        step_sizes=(0.1, 0.05, 0.01),
        n_samples=400,
        delta=2,
        seed=101,
    )
    transform = theopoula_transform(
        lambda th, x: np.atleast_1d(motivating_gradient(float(np.asarray(th).reshape(-1)[0]), x)),
        boost_floor=0.1,
    )
    report = check_class_properties(
        transform,
        lambda th, x: np.atleast_1d(motivating_gradient(float(np.asarray(th).reshape(-1)[0]), x)),
        sample_datum,
        spec,
    )
    bound_ok = all(
        k <= (1.0 / math.sqrt(lam) + math.sqrt(lam)) * (1 + 1e-12)
        for lam, k in report.k_lambda.items()
    )
    return CheckResult(
        "polygonal_class_probe",
        bound_ok and report.drift_positive,
        f"K_lam within per-coordinate cap: {bound_ok}; "
        f"drift estimate at |theta|={report.drift_theta:g} positive: {report.drift_positive} "
        f"({report.caveat})",
    )


def run_diagnose(seed: int = 0) -> list[CheckResult]:
    rng = make_rng(seed)
    return [
        _coordinate_bound(rng),
        _odd_symmetry(rng),
        _slope_and_saturation(),
        _drift_norm_bound(rng),
        _wasserstein_checks(rng),
        _lambda_max_checks(),
        _finite_difference(rng),
        _lipschitz(rng),
        _gibbs_oracle(),
        _class_properties(),
    ]
