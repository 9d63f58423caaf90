"""Artifact writers: CSV trajectories and JSON summaries.

Column order is fixed and documented (step, iterate columns, objective,
gradient norm); floats are written with shortest round-trip repr so identical
runs produce byte-identical CSV files. Every artifact carries the config
hash; writing into a directory whose existing summary carries a different
hash is refused rather than silently overwritten.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .runner import CompareResult, EnsembleRunResult, RunResult, run_metadata

# Iterates with dimension above this are stored as a norm column instead of
# one column per coordinate.
MAX_THETA_COLUMNS = 4


def _fmt(v: float) -> str:
    return repr(float(v))


def _check_overwrite(out_dir: Path, config_hash: str) -> None:
    summary = out_dir / "summary.json"
    if summary.exists():
        try:
            old = json.loads(summary.read_text())
        except json.JSONDecodeError:
            old = {}
        old_hash = old.get("config_hash")
        if old_hash is not None and old_hash != config_hash:
            raise RuntimeError(
                f"{out_dir} holds results for config {old_hash}, refusing to overwrite "
                f"with config {config_hash}; use a fresh output directory"
            )


def theta_columns(dim: int) -> list[str]:
    if dim == 1:
        return ["theta"]
    if dim <= MAX_THETA_COLUMNS:
        return [f"theta_{i}" for i in range(dim)]
    return ["theta_norm"]


def trajectory_rows(result: RunResult) -> tuple[list[str], list[list[str]]]:
    dim = result.record_thetas.shape[1]
    cols = ["step", *theta_columns(dim), "objective", "grad_norm"]
    rows = []
    for i, step in enumerate(result.record_steps):
        th = result.record_thetas[i]
        if dim <= MAX_THETA_COLUMNS:
            theta_part = [_fmt(v) for v in th]
        else:
            theta_part = [_fmt(float(np.sqrt(th @ th)))]
        rows.append(
            [
                str(int(step)),
                *theta_part,
                _fmt(result.record_objectives[i]),
                _fmt(result.record_grad_norms[i]),
            ]
        )
    return cols, rows


def write_csv(path: Path, cols: list[str], rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_run_outputs(result: RunResult, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    _check_overwrite(out, result.config.config_hash())
    cols, rows = trajectory_rows(result)
    write_csv(out / "trajectory.csv", cols, rows)
    summary = run_metadata(result.config)
    dim = result.final_theta.size
    summary.update(
        {
            "final_step": result.final_step,
            "final_theta": result.final_theta.tolist() if dim <= 64 else None,
            "final_theta_norm": float(np.sqrt(result.final_theta @ result.final_theta)),
            "final_objective": float(result.record_objectives[-1]),
            "best_objective": result.best_objective,
            "diverged_at": result.diverged_at,
            "optimizer": result.optimizer_meta,
            "averaging": result.averaging,
            "wall_time_s": result.wall_time_s,
        }
    )
    write_json(out / "summary.json", summary)
    return summary


def write_ensemble_outputs(result: EnsembleRunResult, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    _check_overwrite(out, result.config.config_hash())
    rows = [[str(i), _fmt(v)] for i, v in enumerate(result.endpoints)]
    write_csv(out / "endpoints.csv", ["chain", "theta"], rows)
    summary = run_metadata(result.config)
    summary.update(
        {
            "endpoint_stats": result.summary_stats(),
            "backend": result.backend,
            "wall_time_s": result.wall_time_s,
        }
    )
    write_json(out / "summary.json", summary)
    return summary


def write_compare_outputs(result: CompareResult, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    labels = [cfg.label for cfg in result.configs]
    dim = result.problem.dim
    value_name = "theta" if dim == 1 else "theta_norm"

    # One shared step grid; arms frozen at their last finite value after a
    # divergence so every row stays complete.
    grid = result.results[0].record_steps
    for res in result.results[1:]:
        grid = np.union1d(grid, res.record_steps)
    cols = ["step"] + [f"{value_name}[{lab}]" for lab in labels]
    series = []
    for res in result.results:
        vals = (
            res.record_thetas[:, 0]
            if dim == 1
            else np.sqrt(np.sum(res.record_thetas**2, axis=1))
        )
        idx = np.searchsorted(res.record_steps, grid, side="right") - 1
        idx = np.clip(idx, 0, len(vals) - 1)
        series.append(vals[idx])
    rows = [
        [str(int(step))] + [_fmt(series[a][i]) for a in range(len(labels))]
        for i, step in enumerate(grid)
    ]
    write_csv(out / "compare.csv", cols, rows)
    verdict = {
        "schema_version": 1,
        "config_hashes": {cfg.label: cfg.config_hash() for cfg in result.configs},
        "verdict": result.verdict(),
    }
    write_json(out / "verdict.json", verdict)
    for cfg, res in zip(result.configs, result.results):
        write_run_outputs(res, out / "arms" / str(cfg.label))
    return verdict
