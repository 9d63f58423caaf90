#!/usr/bin/env python3
"""Benchmark: compiled kernel vs pure-numpy fallback on the hot chain loops.

Runs the same seeded workloads through both backends, checks the outputs are
bit-identical, and prints a timing table. Invoke directly:

    python benchmarks/bench_backends.py
"""
import time

import numpy as np

from poula._kernels import available_backends
from poula.chains import run_theopoula_ensemble
from poula.problems import make_problem
from poula.theopoula import HyperParams

WORKLOADS = [
    ("motivating, 1 chain x 1e6 steps", "motivating", {}, 5.0, 1_000_000, 1),
    ("motivating, 1e3 chains x 1e4 steps", "motivating", {}, 5.0, 10_000, 1000),
    ("quadratic, 1e4 chains x 1600 steps", "quadratic", {"a": 1.0}, 0.0, 1600, 10_000),
]


def run_backend(backend: str, problem, theta0, steps, chains):
    hp = HyperParams(step_size=0.01, inverse_temperature=10.0, boost_floor=0.1)
    t0 = time.perf_counter()
    res = run_theopoula_ensemble(problem, hp, theta0, steps, chains, seed=0, backend=backend)
    return time.perf_counter() - t0, res.final


def main() -> None:
    backends = available_backends()
    print(f"available backends: {backends}")
    header = f"{'workload':40s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10s}{'identical':>11s}"
    print(header)
    print("-" * len(header))
    for label, name, kwargs, theta0, steps, chains in WORKLOADS:
        problem = make_problem(name, **kwargs)
        times, finals = [], []
        for b in backends:
            dt, final = run_backend(b, problem, theta0, steps, chains)
            times.append(dt)
            finals.append(final)
        row = f"{label:40s}" + "".join(f"{t:11.3f}s" for t in times)
        if len(backends) > 1:
            row += f"{times[0] / times[-1]:9.1f}x"
            row += f"{str(bool(np.array_equal(finals[0], finals[-1]))):>11s}"
        print(row)


if __name__ == "__main__":
    main()
