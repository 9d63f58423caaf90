"""Backend selection for the hot chain loops.

The compiled kernel is used when its extension module imported successfully;
otherwise the pure-numpy reference takes over. Both produce bit-identical
trajectories (enforced by tests), so the choice only affects speed. Set
``POULA_BACKEND=python`` or ``POULA_BACKEND=cython`` to force one.
"""
from __future__ import annotations

import os

from . import _ref

try:
    from . import _core
except ImportError:  # extension not built; numpy fallback
    _core = None

GRAD_MOTIVATING = _ref.GRAD_MOTIVATING
GRAD_QUADRATIC = _ref.GRAD_QUADRATIC


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _core is not None else [])


def get_backend(name: str = "auto"):
    """Resolve a backend module by name ('auto', 'python', 'cython')."""
    if name == "auto":
        name = os.environ.get("POULA_BACKEND", "auto")
    if name == "auto":
        return _core if _core is not None else _ref
    if name == "python":
        return _ref
    if name == "cython":
        if _core is None:
            raise RuntimeError("the compiled kernel is not available in this install")
        return _core
    raise ValueError(f"unknown backend {name!r}; choose from auto/python/cython")


def default_backend_name() -> str:
    return get_backend("auto").name
