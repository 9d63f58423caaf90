"""Patience-triggered trajectory averaging, usable around any optimizer.

The wrapper watches a per-epoch validation metric. Once the metric has gone
``patience`` consecutive epochs without improving, averaging triggers at the
next epoch, and from then on the reported estimate is the running mean of all
subsequent iterates rather than the last iterate. The inner optimizer is
untouched: same updates, same constant step size; only the reported point
changes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class PatienceAverager:
    """Tracks the patience counter and the post-trigger running mean.

    ``observe_metric`` consumes one validation value per epoch (strictly
    increasing epoch numbers); ``accumulate`` folds one iterate into the mean
    once triggered; ``current_estimate`` returns the mean after the trigger
    and the last iterate before it. Improvement means beating the best metric
    seen so far by more than ``min_delta`` (default: any strict improvement).
    """

    patience: int = 5
    min_delta: float = 0.0
    minimize: bool = True
    trigger_epoch: int | None = None
    best_metric: float | None = None
    epochs_since_best: int = 0
    count: int = 0
    running_mean: np.ndarray | None = None
    premature_accumulate: bool = field(default=False, repr=False)
    _last_epoch: int | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.min_delta < 0:
            raise ValueError(f"min_delta must be >= 0, got {self.min_delta}")

    @property
    def triggered(self) -> bool:
        return self.trigger_epoch is not None

    def observe_metric(self, epoch: int, value: float) -> None:
        if self._last_epoch is not None and epoch <= self._last_epoch:
            raise ValueError(
                f"epochs must be observed in increasing order; got {epoch} after {self._last_epoch}"
            )
        self._last_epoch = epoch
        signed = value if self.minimize else -value
        if self.best_metric is None or self.best_metric - signed > self.min_delta:
            self.best_metric = signed
            self.epochs_since_best = 0
            return
        self.epochs_since_best += 1
        # Once set, the trigger never moves.
        if self.trigger_epoch is None and self.epochs_since_best >= self.patience:
            self.trigger_epoch = epoch + 1

    def accumulate(self, theta: np.ndarray) -> None:
        """Fold one post-trigger iterate into the running mean (numerically
        stable incremental form). Before the trigger this is a warned no-op."""
        if not self.triggered:
            if not self.premature_accumulate:
                self.premature_accumulate = True
                warnings.warn("accumulate() called before the averaging trigger; ignored")
            return
        theta = np.asarray(theta, dtype=np.float64)
        self.count += 1
        if self.running_mean is None:
            self.running_mean = theta.copy()
        else:
            self.running_mean = self.running_mean + (theta - self.running_mean) / self.count

    def current_estimate(self, theta_last: np.ndarray) -> np.ndarray:
        if self.triggered and self.count > 0:
            return np.asarray(self.running_mean)
        return np.asarray(theta_last)
