"""Problem zoo: named constructors behind one factory used by the harness."""
from __future__ import annotations

from .base import Problem
from .mlp import make_mlp_problem
from .motivating import (
    make_motivating_problem,
    motivating_gradient,
    motivating_objective,
    motivating_true_gradient,
)
from .quadratic import make_quadratic_problem

_FACTORIES = {
    "motivating": make_motivating_problem,
    "quadratic": make_quadratic_problem,
    "mlp": make_mlp_problem,
}


def problem_names() -> list[str]:
    return sorted(_FACTORIES)


def make_problem(name: str, **params) -> Problem:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; available: {problem_names()}") from None
    return factory(**params)


__all__ = [
    "Problem",
    "make_problem",
    "problem_names",
    "make_motivating_problem",
    "make_quadratic_problem",
    "make_mlp_problem",
    "motivating_gradient",
    "motivating_objective",
    "motivating_true_gradient",
]
