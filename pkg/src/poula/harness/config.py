"""Experiment configuration: one nested mapping, fully deterministic.

A config plus nothing else reproduces a run: the seed, problem, optimizer,
initial point, budget and recording cadence are all inside it, and its
canonical-JSON hash is stamped into every output artifact so replays against
a different config are refused instead of silently overwriting.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

DEFAULT_AVERAGING = {
    "patience": 5,
    "min_delta": 0.0,
    "epoch_steps": 100,
    "noise_during_averaging": True,
    "metric": "objective",
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    problem: dict[str, Any]
    optimizer: dict[str, Any]
    init: dict[str, Any] = field(default_factory=lambda: {"kind": "gaussian", "scale": 1.0})
    seed: int = 0
    steps: int = 10_000
    chains: int = 1
    record_every: int | None = None
    averaging: dict[str, Any] | None = None
    clip: float | None = None
    label: str | None = None

    def __post_init__(self):
        if "name" not in self.problem:
            raise ConfigError("problem config needs a 'name' field")
        if "name" not in self.optimizer:
            raise ConfigError("optimizer config needs a 'name' field")
        if self.steps < 0:
            raise ConfigError(f"steps must be >= 0, got {self.steps}")
        if self.chains < 1:
            raise ConfigError(f"chains must be >= 1, got {self.chains}")
        if self.record_every is None:
            self.record_every = max(1, self.steps // 1000)
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.averaging is not None:
            merged = dict(DEFAULT_AVERAGING)
            merged.update(self.averaging)
            self.averaging = merged
        if self.clip is not None and not self.clip > 0:
            raise ConfigError(f"clip threshold must be > 0, got {self.clip}")

    def canonical(self) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "optimizer": self.optimizer,
            "init": self.init,
            "seed": self.seed,
            "steps": self.steps,
            "chains": self.chains,
            "record_every": self.record_every,
            "averaging": self.averaging,
            "clip": self.clip,
            "label": self.label,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def replaced(self, **kw) -> "ExperimentConfig":
        data = copy.deepcopy(self.canonical())
        data.update(kw)
        return ExperimentConfig(**data)


def set_dotted(data: dict, path: str, value: Any) -> None:
    """Set ``a.b.c`` style paths inside a nested mapping, creating dicts."""
    keys = path.split(".")
    node = data
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def parse_override(text: str) -> tuple[str, Any]:
    """Parse a ``path=value`` override; the value is read as YAML."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like path=value")
    path, raw = text.split("=", 1)
    return path.strip(), yaml.safe_load(raw)


def load_config_data(path: str | Path | None, overrides: list[str] | None = None) -> dict:
    """Load a YAML mapping (or start empty) and apply dotted overrides."""
    data: dict[str, Any] = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {path} must hold a mapping at top level")
        data = loaded
    for ov in overrides or []:
        key, value = parse_override(ov)
        set_dotted(data, key, value)
    return data


def config_from_data(data: dict) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}; known: {sorted(known)}")
    try:
        return ExperimentConfig(**data)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def comparison_from_data(data: dict) -> list[ExperimentConfig]:
    """Split a config carrying an ``arms`` list into aligned per-arm configs.

    Every arm shares the base problem, init, seed and budget; only the
    optimizer (and label) varies, which isolates the optimizer as the only
    differing factor across arms.
    """
    if "arms" not in data or not data["arms"]:
        raise ConfigError("comparison config needs a nonempty 'arms' list")
    arms = data["arms"]
    base = {k: v for k, v in data.items() if k not in ("arms", "optimizer")}
    configs = []
    for i, arm in enumerate(arms):
        if "optimizer" not in arm:
            raise ConfigError(f"arm {i} needs an 'optimizer' mapping")
        entry = copy.deepcopy(base)
        entry["optimizer"] = arm["optimizer"]
        entry["label"] = arm.get("label", arm["optimizer"].get("name", f"arm{i}"))
        configs.append(config_from_data(entry))
    labels = [c.label for c in configs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"arm labels must be unique, got {labels}")
    return configs
