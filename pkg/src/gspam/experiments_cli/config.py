"""Experiment configuration trees (JSON-compatible)."""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

STUDIES = ("phase_transition", "scale_d", "scale_k", "scale_rho", "single_recovery", "components")
DEFAULT_CTILDE = {"alg1_2": 3.8, "alg3": 5.6, "alg4": 3.0}


class ConfigError(ValueError):
    pass


def _as_list(value, name):
    if isinstance(value, (list, tuple)):
        out = list(value)
    else:
        out = [value]
    if not out:
        raise ConfigError(f"'{name}' must not be empty")
    return out


def _ctilde_grid(value):
    if isinstance(value, dict):
        try:
            start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        except KeyError as exc:
            raise ConfigError(f"ctilde range needs start/stop/step, missing {exc}") from None
        if step <= 0 or stop < start:
            raise ConfigError("ctilde range needs step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(v) for v in _as_list(value, "ctilde")]


@dataclass(frozen=True)
class Cell:
    index: int
    d: int
    T: int
    ctilde: float
    noise: dict


@dataclass
class ExperimentConfig:
    """One study over the grid ``d x T x ctilde x noise``.

    ``noise`` entries are ``{}`` (noiseless), ``{"eps": e}`` or
    ``{"sigma2": s, "N1": n1, "N2": n2}``.  ``T`` is ignored by builtins
    without a size parameter.
    """

    study: str
    model: dict
    algorithm: str = "alg1_2"
    ctilde: list = None
    d: list = field(default_factory=lambda: [100])
    T: list = field(default_factory=lambda: [1])
    noise: list = field(default_factory=lambda: [{}])
    trials: int = 5
    seed: int = 0
    output: str = None
    constants: dict = field(default_factory=dict)
    solver: str = "iht"
    on_excess: str = "raise"
    timing: bool = False
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigError(f"unknown study {self.study!r}; choose from {', '.join(STUDIES)}")
        if isinstance(self.model, str):
            self.model = {"builtin": self.model}
        if not isinstance(self.model, dict):
            raise ConfigError("'model' must be a builtin name or a model config tree")
        if self.algorithm not in DEFAULT_CTILDE:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        self.ctilde = _ctilde_grid(DEFAULT_CTILDE[self.algorithm] if self.ctilde is None else self.ctilde)
        self.d = [int(v) for v in _as_list(self.d, "d")]
        self.T = [int(v) for v in _as_list(self.T, "T")]
        self.noise = [dict(v or {}) for v in _as_list(self.noise, "noise")]
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        self.trials = int(self.trials)
        if self.on_excess not in ("raise", "best_effort"):
            raise ConfigError("on_excess must be 'raise' or 'best_effort'")

    @classmethod
    def from_dict(cls, tree):
        tree = dict(tree)
        known = set(cls.__dataclass_fields__)
        unknown = set(tree) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "study" not in tree or "model" not in tree:
            raise ConfigError("config needs 'study' and 'model'")
        return cls(**tree)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def cells(self):
        grid = itertools.product(self.d, self.T, self.ctilde, self.noise)
        return [Cell(i, d, T, c, n) for i, (d, T, c, n) in enumerate(grid)]
