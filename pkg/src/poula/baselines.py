"""Adam-family baselines and SGD, in the usual framework-default conventions.

All of these fit one template: a first-moment average m_n, a second-moment
average V_n, and the update theta' = theta - lr * m_n / (eps + sqrt(V_n)),
applied elementwise. Adam and AMSGrad default to the bias-corrected form
(matching the reference deep-learning framework defaults); pass
``bias_correction=False`` for the literal uncorrected exponential sums.
RMSProp places its epsilon outside the square root, again matching the
framework default. Step functions are pure: they return a fresh
(theta', state') pair and never mutate their inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .numerics import as_finite_vector


def _check_pair(theta, g):
    theta = as_finite_vector(theta, "theta")
    g = as_finite_vector(g, "gradient")
    if theta.shape != g.shape:
        raise ValueError(f"dimension mismatch: theta {theta.shape} vs gradient {g.shape}")
    return theta, g


@dataclass(frozen=True)
class MomentumState:
    velocity: np.ndarray | None = None
    momentum: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError(f"momentum must lie in [0, 1), got {self.momentum}")


def sgd_step(theta, g, lr: float, state: MomentumState) -> tuple[np.ndarray, MomentumState]:
    """Plain or momentum SGD. With momentum mu the buffer follows b = mu*b + g
    (initialized to the first gradient) and the update is theta - lr*b."""
    theta, g = _check_pair(theta, g)
    if state.momentum == 0.0:
        return theta - lr * g, state
    if state.velocity is None:
        v = g.copy()
    else:
        v = state.momentum * state.velocity + g
    return theta - lr * v, replace(state, velocity=v)


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    bias_correction: bool = True

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"beta1/beta2 must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")

    @classmethod
    def init(cls, dim: int, **kw) -> "AdamState":
        return cls(m=np.zeros(dim), v=np.zeros(dim), **kw)


def adam_step(theta, g, lr: float, state: AdamState) -> tuple[np.ndarray, AdamState]:
    theta, g = _check_pair(theta, g)
    n = state.step_count + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    if state.bias_correction:
        m_hat = m / (1.0 - state.beta1**n)
        v_hat = v / (1.0 - state.beta2**n)
    else:
        m_hat, v_hat = m, v
    theta_new = theta - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return theta_new, replace(state, m=m, v=v, step_count=n)


@dataclass(frozen=True)
class AMSGradState(AdamState):
    v_max: np.ndarray | None = None

    @classmethod
    def init(cls, dim: int, **kw) -> "AMSGradState":
        return cls(m=np.zeros(dim), v=np.zeros(dim), v_max=np.zeros(dim), **kw)


def amsgrad_step(theta, g, lr: float, state: AMSGradState) -> tuple[np.ndarray, AMSGradState]:
    """Adam with a running elementwise maximum of v in the denominator, so the
    effective per-coordinate step size never increases."""
    theta, g = _check_pair(theta, g)
    n = state.step_count + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    v_max = np.maximum(state.v_max if state.v_max is not None else np.zeros_like(v), v)
    if state.bias_correction:
        m_hat = m / (1.0 - state.beta1**n)
        v_hat = v_max / (1.0 - state.beta2**n)
    else:
        m_hat, v_hat = m, v_max
    theta_new = theta - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return theta_new, replace(state, m=m, v=v, v_max=v_max, step_count=n)


@dataclass(frozen=True)
class RMSPropState:
    v: np.ndarray
    alpha: float = 0.99
    eps: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")

    @classmethod
    def init(cls, dim: int, **kw) -> "RMSPropState":
        return cls(v=np.zeros(dim), **kw)


def rmsprop_step(theta, g, lr: float, state: RMSPropState) -> tuple[np.ndarray, RMSPropState]:
    theta, g = _check_pair(theta, g)
    v = state.alpha * state.v + (1.0 - state.alpha) * g * g
    theta_new = theta - lr * g / (np.sqrt(v) + state.eps)
    return theta_new, replace(state, v=v)
