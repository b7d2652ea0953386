"""Experiment configuration for the command-line runner.

A config is one JSON document.  Every rational is written as a string such as
``"1/8"`` so nothing passes through a float on the way in.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, ContractError, ResourceLimitError
from .symgroup import DEFAULT_ENUMERATION_BOUND
from .thoma import ThomaParams

SUITES = (
    "multiplicativity",
    "generalized-multiplicativity",
    "definetti",
    "limit-cycles",
    "spectral",
    "commuting-squares",
    "markov",
    "stirling",
    "antisymmetrizer",
    "transition",
)

DEFAULT_SEED = 0x7E57_5EED_2026_0001
MAX_SLOTS = 24
MAX_DENSE_DIM = 1 << 16
MAX_STIRLING = 9

_KNOWN_KEYS = {
    "params", "slot_count", "zero_labels", "max_dim", "enumeration_bound", "stirling_max", "ell_sequence",
    "cesaro_sizes", "word_length", "star_indices", "factor_length", "cell_params", "suites", "seed", "jobs",
    "out", "csv",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated knobs for every suite.

    ``zero_labels`` fixes how the ``c`` part of ``params`` is modelled:
    ``None`` uses the diffuse limit label, an integer splits ``c`` evenly over
    that many labels.  ``cell_params`` drives the small matrix fixtures, whose
    size grows with the label count.
    """

    params: ThomaParams = field(default_factory=lambda: ThomaParams.parse(["1/2", "1/4"], ["1/8"]))
    slot_count: int = 6
    zero_labels: int | None = None
    max_dim: int = 4096
    enumeration_bound: int = 6
    stirling_max: int = 7
    ell_sequence: tuple[int, ...] = (1, 2, 4, 8, 16)
    cesaro_sizes: tuple[int, ...] = (1, 2, 4, 8, 16)
    word_length: int = 5
    star_indices: int = 4
    factor_length: int = 3
    cell_params: ThomaParams = field(default_factory=lambda: ThomaParams.parse(["2/3"], ["1/3"]))
    suites: tuple[str, ...] = SUITES
    seed: int = DEFAULT_SEED
    jobs: int = 1
    out: str | None = None
    csv: str | None = None

    def __post_init__(self):
        positive = {
            "slot_count": self.slot_count, "max_dim": self.max_dim, "enumeration_bound": self.enumeration_bound,
            "stirling_max": self.stirling_max, "word_length": self.word_length,
            "star_indices": self.star_indices, "factor_length": self.factor_length, "jobs": self.jobs,
        }
        for name, value in positive.items():
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.zero_labels is not None and (not isinstance(self.zero_labels, int) or self.zero_labels < 1):
            raise ConfigError("zero_labels must be null or a positive integer")
        if any(ell < 1 for ell in self.ell_sequence) or any(n < 1 for n in self.cesaro_sizes):
            raise ConfigError("ell_sequence and cesaro_sizes must hold positive integers")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        caps = [
            (self.enumeration_bound, DEFAULT_ENUMERATION_BOUND, "enumeration_bound"),
            (self.stirling_max, MAX_STIRLING, "stirling_max"),
            (self.slot_count, MAX_SLOTS, "slot_count"),
            (self.max_dim, MAX_DENSE_DIM, "max_dim"),
            (max(self.cesaro_sizes, default=1) + 1, MAX_SLOTS, "cesaro size + 1"),
            (self.star_indices + 1, MAX_SLOTS, "star_indices + 1"),
        ]
        for value, cap, name in caps:
            if value > cap:
                raise ResourceLimitError(f"{name}={value} exceeds the cap {cap}")

    @classmethod
    def from_json(cls, data: Mapping) -> ExperimentConfig:
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kwargs = dict(data)
        try:
            for key in ("params", "cell_params"):
                if key in kwargs:
                    kwargs[key] = ThomaParams.from_json(kwargs[key])
        except (ContractError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid parameters: {exc}") from exc
        for key in ("ell_sequence", "cesaro_sizes", "suites"):
            if key in kwargs:
                if not isinstance(kwargs[key], list):
                    raise ConfigError(f"{key} must be a list")
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_json(data)

    def with_overrides(self, **changes) -> ExperimentConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_json(self) -> dict:
        data = asdict(self)
        data["params"] = self.params.to_json()
        data["cell_params"] = self.cell_params.to_json()
        for key in ("ell_sequence", "cesaro_sizes", "suites"):
            data[key] = list(data[key])
        return data
