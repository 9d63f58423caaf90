"""Experiment runner: single trajectories, aligned comparisons, sweeps, ablations.

The generic loop here works with any problem/optimizer pairing and records a
full trajectory; the chain ensemble path (``chains > 1``) delegates to the
vectorized kernel runner. All randomness flows through the three per-run
streams (data, noise, init), so two arms with the same seed consume identical
data and noise sequences regardless of which optimizer they drive.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .. import baselines
from ..averaging import PatienceAverager
from ..chains import has_fast_path, run_theopoula_ensemble
from ..numerics import as_finite_vector
from ..problems import make_problem
from ..problems.base import Problem
from ..rng import RNG_ALGORITHM, make_streams
from ..theopoula import HyperParams, theopoula_step
from .config import ConfigError, ExperimentConfig


def clip_gradient(g: np.ndarray, threshold: float) -> np.ndarray:
    """Global-norm clipping: rescale g to norm ``threshold`` when it is larger.

    Direction is preserved exactly; vectors already inside the ball pass
    through untouched.
    """
    if not threshold > 0:
        raise ValueError(f"clip threshold must be > 0, got {threshold}")
    g = np.asarray(g, dtype=np.float64)
    norm = float(np.sqrt(g @ g))
    if norm > threshold:
        return g * (threshold / norm)
    return g


def _take_params(params: dict, allowed: dict, optimizer: str) -> dict:
    unknown = set(params) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown {optimizer} parameters {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    out = dict(allowed)
    out.update(params)
    return out


def _fnum(v) -> float:
    # YAML treats bare "inf" as a string; accept it as a number anyway.
    return float(v)


class TheoPoulaStepper:
    name = "theopoula"
    uses_noise = True

    def __init__(self, params: dict, noise: np.random.Generator):
        p = _take_params(
            params,
            {
                "step_size": None,
                "inverse_temperature": 1e12,
                "boost_floor": 0.1,
                "reg_strength": 0.0,
                "reg_exponent": 1,
            },
            "theopoula",
        )
        if p["step_size"] is None:
            raise ConfigError("theopoula requires a step_size")
        self.hp = HyperParams(
            step_size=_fnum(p["step_size"]),
            inverse_temperature=_fnum(p["inverse_temperature"]),
            boost_floor=_fnum(p["boost_floor"]),
            reg_strength=_fnum(p["reg_strength"]),
            reg_exponent=int(p["reg_exponent"]),
        )
        self.noise = noise

    def step(self, theta: np.ndarray, g: np.ndarray) -> np.ndarray:
        return theopoula_step(theta, g, self.hp, self.noise)

    def disable_noise(self) -> None:
        self.hp = replace(self.hp, inverse_temperature=math.inf)

    def meta(self) -> dict:
        return {
            "name": self.name,
            "step_size": self.hp.step_size,
            "inverse_temperature": self.hp.inverse_temperature,
            "boost_floor": self.hp.boost_floor,
            "reg_strength": self.hp.reg_strength,
            "reg_exponent": self.hp.reg_exponent,
        }


class BaselineStepper:
    uses_noise = False

    def __init__(self, name: str, params: dict, dim: int):
        self.name = name
        if name == "sgd":
            p = _take_params(params, {"lr": 0.001, "momentum": 0.0}, name)
            self.state = baselines.MomentumState(momentum=_fnum(p["momentum"]))
            self._fn = baselines.sgd_step
        elif name == "adam":
            p = _take_params(
                params,
                {"lr": 0.001, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "bias_correction": True},
                name,
            )
            self.state = baselines.AdamState.init(
                dim,
                beta1=_fnum(p["beta1"]),
                beta2=_fnum(p["beta2"]),
                eps=_fnum(p["eps"]),
                bias_correction=bool(p["bias_correction"]),
            )
            self._fn = baselines.adam_step
        elif name == "amsgrad":
            p = _take_params(
                params,
                {"lr": 0.001, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "bias_correction": True},
                name,
            )
            self.state = baselines.AMSGradState.init(
                dim,
                beta1=_fnum(p["beta1"]),
                beta2=_fnum(p["beta2"]),
                eps=_fnum(p["eps"]),
                bias_correction=bool(p["bias_correction"]),
            )
            self._fn = baselines.amsgrad_step
        elif name == "rmsprop":
            p = _take_params(params, {"lr": 0.001, "alpha": 0.99, "eps": 1e-8}, name)
            self.state = baselines.RMSPropState.init(
                dim, alpha=_fnum(p["alpha"]), eps=_fnum(p["eps"])
            )
            self._fn = baselines.rmsprop_step
        else:
            raise ConfigError(
                f"unknown optimizer {name!r}; available: adam, amsgrad, rmsprop, sgd, theopoula"
            )
        self.lr = _fnum(p["lr"])
        if not self.lr > 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        self._params = p

    def step(self, theta: np.ndarray, g: np.ndarray) -> np.ndarray:
        theta_new, self.state = self._fn(theta, g, self.lr, self.state)
        return theta_new

    def disable_noise(self) -> None:  # baselines carry no injected noise
        pass

    def meta(self) -> dict:
        return {"name": self.name, **self._params}


def make_stepper(optimizer: dict, dim: int, noise: np.random.Generator):
    spec = dict(optimizer)
    name = spec.pop("name")
    if name == "theopoula":
        return TheoPoulaStepper(spec, noise)
    return BaselineStepper(name, spec, dim)


def init_vector(init: dict, dim: int, gen: np.random.Generator) -> np.ndarray:
    kind = init.get("kind")
    if kind == "constant":
        return np.full(dim, float(init["value"]))
    if kind == "explicit":
        vec = as_finite_vector(init["values"], "init.values")
        if vec.size != dim:
            raise ConfigError(f"init.values has {vec.size} entries; problem dimension is {dim}")
        return vec
    if kind == "gaussian":
        return float(init.get("scale", 1.0)) * gen.standard_normal(dim)
    if kind == "uniform":
        return gen.uniform(float(init["low"]), float(init["high"]), size=dim)
    raise ConfigError(f"unknown init kind {kind!r}; use constant/explicit/gaussian/uniform")


@dataclass
class RunResult:
    config: ExperimentConfig
    record_steps: np.ndarray
    record_thetas: np.ndarray  # (rows, dim)
    record_objectives: np.ndarray
    record_grad_norms: np.ndarray
    final_theta: np.ndarray
    final_step: int
    diverged_at: int | None
    best_objective: float
    averaging: dict | None
    optimizer_meta: dict
    wall_time_s: float

    @property
    def estimate(self) -> np.ndarray:
        """Reported point: the post-trigger average when it exists, else the
        last iterate."""
        if self.averaging and self.averaging.get("count", 0) > 0:
            return np.asarray(self.averaging["mean"])
        return self.final_theta

    def distance_to_optimum(self, problem: Problem) -> float | None:
        if problem.optimum is None:
            return None
        delta = self.estimate - problem.optimum[0]
        return float(np.sqrt(delta @ delta))


def build_problem(config: ExperimentConfig) -> Problem:
    spec = dict(config.problem)
    name = spec.pop("name")
    return make_problem(name, **spec)


def run_experiment(config: ExperimentConfig, problem: Problem | None = None) -> RunResult:
    """Execute one seeded trajectory and record it at the configured cadence.

    Non-finite gradients or iterates stop the run: the trajectory freezes at
    the last finite iterate and ``diverged_at`` reports the offending step.
    """
    t_start = time.perf_counter()
    if problem is None:
        problem = build_problem(config)
    streams = make_streams(config.seed)
    stepper = make_stepper(config.optimizer, problem.dim, streams.noise)
    theta = init_vector(config.init, problem.dim, streams.init)

    avg_cfg = config.averaging
    averager = None
    epoch_steps = 0
    if avg_cfg is not None:
        if avg_cfg["metric"] != "objective":
            raise ConfigError(f"unsupported averaging metric {avg_cfg['metric']!r}")
        averager = PatienceAverager(
            patience=int(avg_cfg["patience"]), min_delta=float(avg_cfg["min_delta"])
        )
        epoch_steps = int(avg_cfg["epoch_steps"])
        if epoch_steps < 1:
            raise ConfigError(f"averaging.epoch_steps must be >= 1, got {epoch_steps}")

    steps_rec: list[int] = []
    thetas_rec: list[np.ndarray] = []
    obj_rec: list[float] = []
    gnorm_rec: list[float] = []

    def record(step: int, g_norm: float) -> None:
        steps_rec.append(step)
        thetas_rec.append(theta.copy())
        obj_rec.append(float(problem.objective(theta)))
        gnorm_rec.append(g_norm)

    record(0, float("nan"))
    diverged_at = None
    noise_disabled = False
    last_g_norm = float("nan")
    n = 0
    for n in range(1, config.steps + 1):
        in_averaging_phase = (
            averager is not None
            and averager.triggered
            and (n - 1) // epoch_steps + 1 >= averager.trigger_epoch
        )
        if (
            in_averaging_phase
            and not avg_cfg["noise_during_averaging"]
            and not noise_disabled
        ):
            stepper.disable_noise()
            noise_disabled = True
        x = problem.sample_data(streams.data)
        g = np.asarray(problem.gradient(theta, x), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            diverged_at = n
            n -= 1
            break
        if config.clip is not None:
            g = clip_gradient(g, config.clip)
        theta_new = stepper.step(theta, g)
        if not np.all(np.isfinite(theta_new)):
            diverged_at = n
            n -= 1
            break
        theta = theta_new
        last_g_norm = float(np.sqrt(g @ g))
        if averager is not None:
            if in_averaging_phase:
                averager.accumulate(theta)
            if n % epoch_steps == 0:
                averager.observe_metric(n // epoch_steps, float(problem.objective(theta)))
        if n % config.record_every == 0:
            record(n, last_g_norm)

    final_step = n if config.steps > 0 else 0
    if not steps_rec or steps_rec[-1] != final_step:
        record(final_step, last_g_norm)

    avg_summary = None
    if averager is not None:
        avg_summary = {
            "patience": averager.patience,
            "min_delta": averager.min_delta,
            "trigger_epoch": averager.trigger_epoch,
            "count": averager.count,
            "mean": None if averager.running_mean is None else averager.running_mean.tolist(),
        }
        if averager.running_mean is not None:
            avg_summary["mean_objective"] = float(problem.objective(averager.running_mean))

    return RunResult(
        config=config,
        record_steps=np.asarray(steps_rec, dtype=np.int64),
        record_thetas=np.asarray(thetas_rec),
        record_objectives=np.asarray(obj_rec),
        record_grad_norms=np.asarray(gnorm_rec),
        final_theta=theta,
        final_step=final_step,
        diverged_at=diverged_at,
        best_objective=float(np.nanmin(obj_rec)),
        averaging=avg_summary,
        optimizer_meta=stepper.meta(),
        wall_time_s=time.perf_counter() - t_start,
    )


@dataclass
class EnsembleRunResult:
    config: ExperimentConfig
    endpoints: np.ndarray
    backend: str
    wall_time_s: float

    def summary_stats(self) -> dict:
        return {
            "chains": int(self.endpoints.size),
            "mean": float(self.endpoints.mean()),
            "variance": float(self.endpoints.var()),
            "abs_mean": float(np.abs(self.endpoints).mean()),
        }


def run_ensemble(config: ExperimentConfig, problem: Problem | None = None) -> EnsembleRunResult:
    """Vectorized many-chain run (endpoints only); theopoula on 1-D problems."""
    t_start = time.perf_counter()
    if problem is None:
        problem = build_problem(config)
    if config.optimizer.get("name") != "theopoula":
        raise ConfigError("multi-chain runs support the theopoula optimizer only")
    if not has_fast_path(problem):
        raise ConfigError(f"problem {problem.name!r} has no vectorized chain kernel")
    streams = make_streams(config.seed)
    stepper = TheoPoulaStepper(
        {k: v for k, v in config.optimizer.items() if k != "name"}, streams.noise
    )
    theta0 = init_vector(config.init, config.chains, streams.init)
    res = run_theopoula_ensemble(
        problem, stepper.hp, theta0, config.steps, config.chains, seed=config.seed
    )
    return EnsembleRunResult(
        config=config,
        endpoints=res.final,
        backend=res.backend,
        wall_time_s=time.perf_counter() - t_start,
    )


@dataclass
class CompareResult:
    configs: list[ExperimentConfig]
    results: list[RunResult]
    problem: Problem

    def verdict(self) -> dict:
        out = {}
        for cfg, res in zip(self.configs, self.results):
            out[cfg.label] = {
                "final_distance_to_optimum": res.distance_to_optimum(self.problem),
                "final_objective": float(res.record_objectives[-1]),
                "best_objective": res.best_objective,
                "diverged_at": res.diverged_at,
            }
        return out


def compare(configs: list[ExperimentConfig]) -> CompareResult:
    """Run aligned arms: same problem, init, seed and budget; only the
    optimizer differs, and every arm sees identical data/noise streams."""
    if not configs:
        raise ConfigError("compare needs at least one config")
    head = configs[0]
    for cfg in configs[1:]:
        for field_name in ("problem", "init", "seed", "steps", "record_every"):
            if getattr(cfg, field_name) != getattr(head, field_name):
                raise ConfigError(
                    f"compare arms must share {field_name}; "
                    f"{cfg.label!r} differs from {head.label!r}"
                )
    problem = build_problem(head)
    results = [run_experiment(cfg, problem) for cfg in configs]
    return CompareResult(configs=configs, results=results, problem=problem)


@dataclass
class SweepResult:
    axis: str
    values: list[Any]
    rows: list[dict]


def sweep(base: ExperimentConfig, axis: str, values: list[Any]) -> SweepResult:
    """Re-run the base config with ``axis`` (a dotted config path) swept over
    ``values``, in the order given."""
    from .config import set_dotted

    if not values:
        raise ConfigError("sweep needs a nonempty list of values")
    parts = axis.split(".")
    probe = base.canonical()
    node = probe
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"unknown sweep axis {axis!r}")
        node = node[p]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError(f"unknown sweep axis {axis!r}")

    rows = []
    for v in values:
        data = base.canonical()
        set_dotted(data, axis, v)
        cfg = ExperimentConfig(**data)
        cfg.label = f"{axis}={v}"
        problem = build_problem(cfg)
        res = run_experiment(cfg, problem)
        rows.append(
            {
                "axis": axis,
                "value": v,
                "final_objective": float(res.record_objectives[-1]),
                "best_objective": res.best_objective,
                "final_distance_to_optimum": res.distance_to_optimum(problem),
                "diverged_at": res.diverged_at,
            }
        )
    return SweepResult(axis=axis, values=list(values), rows=rows)


@dataclass
class AblateResult:
    boosted: RunResult
    unboosted: RunResult

    def summary(self) -> dict:
        return {
            "boosted": {
                "boost_floor": self.boosted.optimizer_meta["boost_floor"],
                "final_training_loss": float(self.boosted.record_objectives[-1]),
                "best_training_loss": self.boosted.best_objective,
            },
            "unboosted": {
                "boost_floor": self.unboosted.optimizer_meta["boost_floor"],
                "final_training_loss": float(self.unboosted.record_objectives[-1]),
                "best_training_loss": self.unboosted.best_objective,
            },
            "boosted_minus_unboosted": float(
                self.boosted.record_objectives[-1] - self.unboosted.record_objectives[-1]
            ),
        }


def ablate_boosting(config: ExperimentConfig) -> AblateResult:
    """Matched pair: the configured boost floor against the boost-free
    (boost_floor = inf) variant, identical seeds and data streams."""
    if config.optimizer.get("name") != "theopoula":
        raise ConfigError("ablate_boosting requires a theopoula optimizer config")
    problem = build_problem(config)
    off = dict(config.optimizer)
    off["boost_floor"] = math.inf
    boosted = run_experiment(config, problem)
    unboosted = run_experiment(config.replaced(optimizer=off), problem)
    return AblateResult(boosted=boosted, unboosted=unboosted)


def run_metadata(config: ExperimentConfig) -> dict:
    from .._kernels import default_backend_name

    return {
        "schema_version": 1,
        "config_hash": config.config_hash(),
        "config": config.canonical(),
        "rng_algorithm": RNG_ALGORITHM,
        "kernel_backend": default_backend_name(),
    }
