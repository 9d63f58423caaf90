"""Teacher-student regression on a small dense network.

A fixed teacher network (seeded) labels a fixed Gaussian design matrix, with
Gaussian label noise added once at construction. The student minimizes the
mini-batch mean of 0.5*|f(x; theta) - y|^2 over the frozen dataset, so the
full-dataset objective is an exact finite sum and the mini-batch gradient is
an unbiased estimate of its gradient. Gradients are analytic backprop; no
autodiff involved.
"""
from __future__ import annotations

import numpy as np

from ..rng import make_rng
from .base import Problem

_ACTIVATIONS = {
    "tanh": (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
    "relu": (lambda z: np.maximum(z, 0.0), lambda z: (z > 0.0).astype(np.float64)),
    "identity": (lambda z: z, lambda z: np.ones_like(z)),
}


def param_count(layers: list[int]) -> int:
    return sum((fin + 1) * fout for fin, fout in zip(layers[:-1], layers[1:]))


def unflatten(theta: np.ndarray, layers: list[int]) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into (weight, bias) pairs per layer."""
    out, i = [], 0
    for fin, fout in zip(layers[:-1], layers[1:]):
        w = theta[i : i + fin * fout].reshape(fin, fout)
        i += fin * fout
        b = theta[i : i + fout]
        i += fout
        out.append((w, b))
    return out


def flatten(pairs: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in pairs])


def forward(theta: np.ndarray, X: np.ndarray, layers: list[int], activation: str = "tanh"):
    """Return (prediction, per-layer activations, per-layer pre-activations).

    Hidden layers use ``activation``; the output layer is linear.
    """
    act, _ = _ACTIVATIONS[activation]
    pairs = unflatten(theta, layers)
    h = X
    acts, pres = [X], []
    for k, (w, b) in enumerate(pairs):
        z = h @ w + b
        pres.append(z)
        h = act(z) if k < len(pairs) - 1 else z
        acts.append(h)
    return acts[-1], acts, pres


def loss_and_grad(
    theta: np.ndarray, X: np.ndarray, y: np.ndarray, layers: list[int], activation: str = "tanh"
) -> tuple[float, np.ndarray]:
    """Mean squared-error loss 0.5*mean|f(x)-y|^2 and its exact gradient."""
    _, dact = _ACTIVATIONS[activation]
    pairs = unflatten(theta, layers)
    pred, acts, pres = forward(theta, X, layers, activation)
    resid = pred - y
    n = X.shape[0]
    loss = 0.5 * float(np.mean(np.sum(resid**2, axis=1)))
    delta = resid / n
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(pairs)  # type: ignore[list-item]
    for k in reversed(range(len(pairs))):
        grads[k] = (acts[k].T @ delta, delta.sum(axis=0))
        if k > 0:
            delta = (delta @ pairs[k][0].T) * dact(pres[k - 1])
    return loss, flatten(grads)


def _init_params(layers: list[int], gen: np.random.Generator, scale: float) -> np.ndarray:
    pairs = []
    for fin, fout in zip(layers[:-1], layers[1:]):
        w = gen.normal(0.0, scale / np.sqrt(fin), size=(fin, fout))
        pairs.append((w, np.zeros(fout)))
    return flatten(pairs)


def make_mlp_problem(
    layers: list[int],
    activation: str = "tanh",
    n_data: int = 256,
    label_noise: float = 0.05,
    batch_size: int = 32,
    seed: int = 0,
) -> Problem:
    """Build the teacher-student problem; everything data-side is frozen by ``seed``."""
    layers = [int(v) for v in layers]
    if len(layers) < 2 or any(v < 1 for v in layers):
        raise ValueError(f"invalid layer spec {layers}; need >= 2 positive sizes")
    if activation not in _ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}; choose from {sorted(_ACTIVATIONS)}")
    d = param_count(layers)
    if d > 100_000:
        raise ValueError(f"parameter count {d} exceeds the 1e5 desk-scale cap")

    gen = make_rng(seed)
    teacher = _init_params(layers, gen, scale=1.0)
    X = gen.normal(size=(n_data, layers[0]))
    y, _, _ = forward(teacher, X, layers, activation)
    y = y + label_noise * gen.normal(size=y.shape)

    def sample_batch(data_gen: np.random.Generator) -> np.ndarray:
        return data_gen.integers(0, n_data, size=batch_size)

    def gradient(theta, idx):
        _, g = loss_and_grad(np.asarray(theta, dtype=np.float64), X[idx], y[idx], layers, activation)
        return g

    def objective(theta):
        loss, _ = loss_and_grad(np.asarray(theta, dtype=np.float64), X, y, layers, activation)
        return loss

    def mean_gradient(theta):
        _, g = loss_and_grad(np.asarray(theta, dtype=np.float64), X, y, layers, activation)
        return g

    return Problem(
        name="mlp",
        dim=d,
        sample_data=sample_batch,
        gradient=gradient,
        objective=objective,
        objective_exact=True,  # finite sum over the frozen dataset
        mean_gradient=mean_gradient,
        optimum=None,
        params={
            "layers": layers,
            "activation": activation,
            "n_data": n_data,
            "label_noise": label_noise,
            "batch_size": batch_size,
            "seed": seed,
        },
    )
