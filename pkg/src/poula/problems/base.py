"""Gradient-oracle contract shared by every problem in the zoo."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np


@dataclass
class Problem:
    """A stochastic optimization problem exposed through three callables.

    ``sample_data`` draws one datum (or batch token) from the problem's data
    distribution using the caller's generator; ``gradient`` evaluates the
    unbiased stochastic gradient G(theta, x); ``objective`` evaluates the true
    objective u(theta) -- exactly when ``objective_exact`` is set, otherwise
    as a Monte-Carlo estimate. ``mean_gradient`` is the gradient of the true
    objective when a closed form exists. Problems are immutable after
    construction; all per-run randomness flows through the generators the
    caller passes in.
    """

    name: str
    dim: int
    sample_data: Callable[[np.random.Generator], Any]
    gradient: Callable[[np.ndarray, Any], np.ndarray]
    objective: Callable[[np.ndarray], float]
    objective_exact: bool = True
    mean_gradient: Callable[[np.ndarray], np.ndarray] | None = None
    optimum: tuple[np.ndarray, float] | None = None
    # Declared gradient growth exponent q, stored for documentation only; the
    # pairing constraint with the regularization exponent is not enforced.
    growth_exponent: float | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def optimum_value(self) -> float:
        if self.optimum is None:
            raise ValueError(f"problem {self.name!r} has no known optimum")
        return self.optimum[1]
