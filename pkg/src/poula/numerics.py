"""Small numeric helpers shared by the optimizers and the fast kernels.

The compiled kernel mirrors these routines operation-for-operation; change
anything here and the kernel must change with it, otherwise the two backends
stop producing bit-identical trajectories (tests/test_kernels.py enforces
this).
"""
from __future__ import annotations

import numpy as np

# |x|^k saturates the tamed ratios once k*log|x| passes this (exp overflow).
LOG_SATURATION = 708.0

# Above this magnitude the taming denominator 1 + sqrt(lam)*|g| is at risk of
# overflowing; the transform is already at its saturated value there.
SATURATION_SCALE = 1e300


def ipow(x, exponent: int):
    """Integer power by binary squaring, preserving the input dtype.

    Used instead of ``**`` so that the pure-python and compiled backends
    perform the exact same multiplication sequence (right-to-left binary
    decomposition of the exponent).
    """
    if exponent < 0:
        raise ValueError("ipow expects a nonnegative exponent")
    scalar = np.isscalar(x)
    p = np.asarray(x).copy()
    acc = np.ones_like(p)
    e = int(exponent)
    while e:
        if e & 1:
            acc = acc * p
        e >>= 1
        if e:
            p = p * p
    return acc[()] if scalar else acc


def ipow_extended(x, exponent: int):
    """``ipow`` evaluated in extended precision, rounded back to float64.

    High odd powers (the degree-29/30 terms of the built-in test objective)
    are accumulated in 80-bit floats to keep the relative error well under
    the documented 1e-12 budget.
    """
    scalar = np.isscalar(x)
    wide = ipow(np.asarray(x, dtype=np.longdouble), exponent)
    out = np.asarray(wide, dtype=np.float64)
    return float(out[()]) if scalar else out


def as_finite_vector(x, name: str) -> np.ndarray:
    """Validate and return a 1-D float64 vector with all entries finite."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr
