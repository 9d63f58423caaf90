from .config import ExperimentConfig, comparison_from_data, config_from_data, load_config_data
from .runner import (
    ablate_boosting,
    clip_gradient,
    compare,
    run_ensemble,
    run_experiment,
    sweep,
)

__all__ = [
    "ExperimentConfig",
    "ablate_boosting",
    "clip_gradient",
    "compare",
    "comparison_from_data",
    "config_from_data",
    "load_config_data",
    "run_ensemble",
    "run_experiment",
    "sweep",
]
