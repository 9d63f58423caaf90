"""Tamed-boosted Langevin optimization with baselines and diagnostics.

The package ships the TheoPoula update (a polygonal Langevin scheme whose
per-coordinate drift is tamed against exploding gradients and boosted against
vanishing ones), the Adam-family baselines it is compared with, a
patience-triggered averaging wrapper, a zoo of desk-scale test problems, and
quantitative diagnostics (Gibbs-measure oracles, 1-D Wasserstein distances,
moment and excess-risk estimators). A compiled kernel accelerates the long
chain loops when available; otherwise a bit-identical numpy fallback is used.
"""
from ._kernels import available_backends, default_backend_name
from .averaging import PatienceAverager
from .baselines import (
    AdamState,
    AMSGradState,
    MomentumState,
    RMSPropState,
    adam_step,
    amsgrad_step,
    rmsprop_step,
    sgd_step,
)
from .problems import make_problem, problem_names
from .rng import RNG_ALGORITHM, make_rng, make_streams
from .theopoula import (
    HyperParams,
    regularization_drift_coord,
    tamed_boosted_coord,
    theopoula_gradient,
    theopoula_step,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "AMSGradState",
    "HyperParams",
    "MomentumState",
    "PatienceAverager",
    "RMSPropState",
    "RNG_ALGORITHM",
    "adam_step",
    "amsgrad_step",
    "available_backends",
    "default_backend_name",
    "make_problem",
    "make_rng",
    "make_streams",
    "problem_names",
    "regularization_drift_coord",
    "rmsprop_step",
    "sgd_step",
    "tamed_boosted_coord",
    "theopoula_gradient",
    "theopoula_step",
    "__version__",
]
