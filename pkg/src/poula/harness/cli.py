"""Command-line entry point.

Verbs: run, compare, sweep, ablate, diagnose, rate-sweep. Every verb takes a
YAML config (where applicable), dotted ``--set path=value`` overrides, and
``--seed`` / ``--out-dir`` flags. Exit code 0 on success; on failure a
machine-readable JSON error object goes to stderr and the exit code is
nonzero.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    ConfigError,
    comparison_from_data,
    config_from_data,
    load_config_data,
)


def _common_flags(p: argparse.ArgumentParser, needs_config: bool) -> None:
    p.add_argument("-c", "--config", required=needs_config, help="YAML config file")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="override a config field, e.g. --set optimizer.step_size=0.05",
    )
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out-dir", default="out", help="output directory (default: out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poula",
        description="Langevin-type optimizer experiments, sweeps and diagnostics",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    _common_flags(sub.add_parser("run", help="run one configured experiment"), True)
    _common_flags(
        sub.add_parser("compare", help="run aligned optimizer arms from an 'arms' config"), True
    )

    p_sweep = sub.add_parser("sweep", help="sweep one config field over a value list")
    _common_flags(p_sweep, True)
    p_sweep.add_argument("--axis", required=True, help="dotted config path, e.g. optimizer.step_size")
    p_sweep.add_argument(
        "--values", required=True, help="comma-separated values, parsed as YAML scalars"
    )

    _common_flags(
        sub.add_parser("ablate", help="matched boosted vs boost-free pair for a theopoula config"),
        True,
    )

    p_diag = sub.add_parser("diagnose", help="run the property-check suites")
    _common_flags(p_diag, False)

    p_rate = sub.add_parser(
        "rate-sweep", help="Wasserstein distance to the Gibbs target across step sizes"
    )
    _common_flags(p_rate, False)
    p_rate.add_argument("--lambdas", default="0.1,0.025,0.00625")
    p_rate.add_argument("--chains", type=int, default=10_000)
    p_rate.add_argument("--diffusion-time", type=float, default=10.0)
    p_rate.add_argument("--beta", type=float, default=1.0)
    p_rate.add_argument("--boost-floor", type=float, default=0.1)
    p_rate.add_argument("--curvature", type=float, default=1.0)
    return parser


def _parse_values(text: str):
    import yaml

    return [yaml.safe_load(v) for v in text.split(",") if v.strip() != ""]


def _load_config(args):
    data = load_config_data(args.config, args.overrides)
    if args.seed is not None:
        data["seed"] = args.seed
    return data


def _cmd_run(args) -> int:
    from .io import write_ensemble_outputs, write_run_outputs
    from .runner import run_ensemble, run_experiment

    cfg = config_from_data(_load_config(args))
    out = Path(args.out_dir) / (cfg.label or "run")
    if cfg.chains > 1:
        summary = write_ensemble_outputs(run_ensemble(cfg), out)
    else:
        summary = write_run_outputs(run_experiment(cfg), out)
    print(json.dumps({"out_dir": str(out), "config_hash": summary["config_hash"]}))
    return 0


def _cmd_compare(args) -> int:
    from .io import write_compare_outputs
    from .runner import compare

    configs = comparison_from_data(_load_config(args))
    result = compare(configs)
    verdict = write_compare_outputs(result, Path(args.out_dir))
    print(json.dumps(verdict["verdict"], indent=2, sort_keys=True))
    return 0


def _cmd_sweep(args) -> int:
    from .io import write_csv, write_json
    from .runner import sweep

    cfg = config_from_data(_load_config(args))
    values = _parse_values(args.values)
    result = sweep(cfg, args.axis, values)
    out = Path(args.out_dir)
    cols = ["value", "final_objective", "best_objective", "final_distance_to_optimum", "diverged_at"]
    rows = [[json.dumps(r["value"])] + [json.dumps(r[c]) for c in cols[1:]] for r in result.rows]
    write_csv(out / "sweep.csv", cols, rows)
    write_json(out / "sweep.json", {"axis": result.axis, "rows": result.rows})
    print(json.dumps(result.rows, indent=2))
    return 0


def _cmd_ablate(args) -> int:
    from .io import write_json, write_run_outputs
    from .runner import ablate_boosting

    cfg = config_from_data(_load_config(args))
    result = ablate_boosting(cfg)
    out = Path(args.out_dir)
    write_run_outputs(result.boosted, out / "boosted")
    write_run_outputs(result.unboosted, out / "unboosted")
    summary = result.summary()
    write_json(out / "ablate.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_diagnose(args) -> int:
    from .io import write_csv, write_json
    from .suites import run_diagnose

    seed = args.seed if args.seed is not None else 0
    checks = run_diagnose(seed)
    out = Path(args.out_dir)
    write_csv(
        out / "diagnostics.csv",
        ["check", "passed", "detail"],
        [[c.name, str(c.passed).lower(), c.detail.replace(",", ";")] for c in checks],
    )
    write_json(
        out / "diagnostics.json",
        {"seed": seed, "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]},
    )
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    if not all(c.passed for c in checks):
        raise RuntimeError("one or more diagnostic checks failed")
    return 0


def _cmd_rate_sweep(args) -> int:
    from ..diagnostics import rate_sweep
    from ..problems import make_problem
    from ..theopoula import HyperParams
    from .io import write_csv, write_json

    lambdas = [float(v) for v in _parse_values(args.lambdas)]
    hp = HyperParams(
        step_size=lambdas[0],
        inverse_temperature=args.beta,
        boost_floor=args.boost_floor,
    )
    problem = make_problem("quadratic", a=args.curvature)
    seed = args.seed if args.seed is not None else 0
    result = rate_sweep(
        problem, hp, lambdas, args.chains, args.diffusion_time, seed=seed
    )
    out = Path(args.out_dir)
    write_csv(
        out / "rate_sweep.csv",
        ["step_size", "n_steps", "w1", "w2"],
        [
            [repr(r.step_size), str(r.n_steps), repr(r.w1), repr(r.w2)]
            for r in result.rows
        ],
    )
    payload = {
        "diffusion_time": result.diffusion_time,
        "chain_count": result.chain_count,
        "w1_slope": result.w1_slope,
        "w2_slope": result.w2_slope,
        "rows": [r.__dict__ for r in result.rows],
    }
    write_json(out / "rate_sweep.json", payload)
    print(json.dumps(payload, indent=2))
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "ablate": _cmd_ablate,
    "diagnose": _cmd_diagnose,
    "rate-sweep": _cmd_rate_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
