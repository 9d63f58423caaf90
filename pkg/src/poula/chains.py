"""Vectorized multi-chain runner for the built-in one-dimensional problems.

This is the fast path behind the sampler diagnostics and the long moment
runs: all chains advance together through a backend kernel, consuming random
numbers in a fixed step-major order (data stream and noise stream drawn from
separate generators), so results are independent of internal block sizes and
identical across backends.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import GRAD_MOTIVATING, GRAD_QUADRATIC, get_backend
from .problems.base import Problem
from .problems.motivating import DATA_HIGH, DATA_LOW
from .rng import make_streams
from .theopoula import HyperParams

# Steps per random block; chosen so block buffers stay small. Results do not
# depend on this value (streams are consumed in step-major order regardless).
_BLOCK_TARGET = 1 << 22


def _block_size(n_chains: int) -> int:
    return max(1, min(65536, _BLOCK_TARGET // max(1, n_chains)))


@dataclass
class EnsembleResult:
    final: np.ndarray
    record: np.ndarray | None
    record_steps: np.ndarray | None
    backend: str
    seed: int


def _grad_kind(problem: Problem) -> tuple[int, float]:
    if problem.dim != 1:
        raise ValueError("the chain kernel handles one-dimensional problems only")
    if problem.name == "motivating":
        return GRAD_MOTIVATING, 0.0
    if problem.name == "quadratic":
        return GRAD_QUADRATIC, float(problem.params["a"])
    raise ValueError(f"no chain kernel for problem {problem.name!r}; use the generic runner")


def has_fast_path(problem: Problem) -> bool:
    try:
        _grad_kind(problem)
    except ValueError:
        return False
    return True


def run_theopoula_ensemble(
    problem: Problem,
    hp: HyperParams,
    theta0,
    n_steps: int,
    n_chains: int,
    seed: int,
    record_every: int = 0,
    backend: str = "auto",
) -> EnsembleResult:
    """Run ``n_chains`` independent chains for ``n_steps`` steps.

    ``theta0`` may be a scalar (all chains identical) or an array of
    per-chain starts. With ``record_every=k`` the iterate is kept after every
    k-th step (1 keeps the full trajectory); the record array has one row per
    kept step and one column per chain.
    """
    kind, grad_a = _grad_kind(problem)
    mod = get_backend(backend)
    if n_steps < 0 or n_chains < 1:
        raise ValueError("need n_steps >= 0 and n_chains >= 1")

    theta = np.full(n_chains, np.float64(theta0)) if np.isscalar(theta0) else np.array(
        theta0, dtype=np.float64
    ).reshape(-1).copy()
    if theta.size != n_chains:
        raise ValueError(f"theta0 has {theta.size} entries for {n_chains} chains")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta0 contains non-finite entries")

    streams = make_streams(seed)
    noise_on = hp.noise_enabled
    rec_rows = 0 if record_every <= 0 else n_steps // record_every
    record = np.empty((rec_rows, n_chains)) if rec_rows else None
    record_steps = np.empty(rec_rows, dtype=np.int64) if rec_rows else None

    block = _block_size(n_chains)
    buf = np.empty((min(block, max(n_steps, 1)), n_chains)) if rec_rows else None
    done = 0
    written = 0
    while done < n_steps:
        b = min(block, n_steps - done)
        xs = (
            streams.data.uniform(DATA_LOW, DATA_HIGH, size=(b, n_chains))
            if kind == GRAD_MOTIVATING
            else None
        )
        zs = streams.noise.standard_normal(size=(b, n_chains)) if noise_on else None
        chunk_rec = buf[:b] if rec_rows else None
        theta = np.asarray(
            mod.theopoula_chunk(
                theta,
                xs,
                zs,
                b,
                hp.step_size,
                hp.boost_floor,
                hp.reg_strength,
                hp.reg_exponent,
                hp.noise_scale,
                kind,
                grad_a,
                chunk_rec,
            )
        )
        if rec_rows:
            # Steps are 1-based; keep global steps divisible by the cadence.
            first = done + 1
            local = np.arange(b)
            keep = local[(first + local) % record_every == 0]
            k = keep.size
            record[written : written + k] = chunk_rec[keep]
            record_steps[written : written + k] = first + keep
            written += k
        done += b
    if not np.all(np.isfinite(theta)):
        raise RuntimeError("chain iterates left the finite range; reduce the step size")
    return EnsembleResult(
        final=theta,
        record=record,
        record_steps=record_steps,
        backend=mod.name,
        seed=int(seed),
    )
