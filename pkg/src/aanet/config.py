"""Experiment configuration: a strict JSON schema with unknown-key rejection."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError
from .network import ArchSpec, PlacementConfig
from .robustness import CORRUPTIONS

DATA_SOURCES = ("stripes", "shapes", "idx")


def _desk_arch() -> ArchSpec:
    return ArchSpec(stages=((8, 1), (16, 1), (32, 1)), input_shape=(1, 16, 16), num_classes=16)


def _desk_placement() -> PlacementConfig:
    return replace(PlacementConfig.best_model(), conv1_stride=1)


def _check_keys(cls, d, section):
    if not isinstance(d, dict):
        raise ConfigError(f"{section} must be a JSON object")
    unknown = set(d) - {f.name for f in fields(cls)}
    if unknown:
        raise ConfigError(f"unknown {section} keys: {sorted(unknown)}")


def _typed(value, kind, name):
    # bool is an int subclass; reject it where a number is expected
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is bool and not isinstance(value, bool):
        raise ConfigError(f"{name} must be a boolean")
    if kind in (int, float) and (isinstance(value, bool) or not isinstance(value, kind)):
        raise ConfigError(f"{name} must be {kind.__name__}, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise ConfigError(f"{name} must be a string")
    return value


class _Section:
    """Flat dataclass section whose fields are all scalars."""

    _types: dict = {}

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict):
        _check_keys(cls, d, cls._section)
        kw = {k: _typed(v, cls._types[k], f"{cls._section}.{k}") for k, v in d.items()}
        return cls(**kw)


@dataclass(frozen=True)
class TrainConfig(_Section):
    lr: float = 0.05
    momentum: float = 0.9
    epochs: int = 6
    batch: int = 32
    seed: int = 0
    lr_decay: float = 0.8

    _section = "train"
    _types = {"lr": float, "momentum": float, "epochs": int, "batch": int, "seed": int, "lr_decay": float}

    def __post_init__(self):
        if self.lr < 0:
            raise ConfigError("train.lr must be non-negative")
        if not 0 <= self.momentum < 1:
            raise ConfigError("train.momentum must lie in [0, 1)")
        if self.epochs < 0 or self.batch < 2:
            raise ConfigError("train.epochs must be >= 0 and train.batch >= 2")
        if self.lr_decay <= 0:
            raise ConfigError("train.lr_decay must be positive")


@dataclass(frozen=True)
class DataConfig(_Section):
    """``source`` is a synthetic generator id or ``idx``.

    Synthetic data uses ``seed`` for the training split and ``seed + 1`` for
    the test split. IDX data reads the four paths; without test paths the
    last ``test_size`` training examples are held out.
    """

    source: str = "stripes"
    train_size: int = 1000
    test_size: int = 300
    num_classes: int = 16
    image_size: int = 16
    noise: float = 0.3
    seed: int = 1
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""

    _section = "data"
    _types = {
        "source": str, "train_size": int, "test_size": int, "num_classes": int, "image_size": int,
        "noise": float, "seed": int, "train_images": str, "train_labels": str, "test_images": str,
        "test_labels": str,
    }

    def __post_init__(self):
        if self.source not in DATA_SOURCES:
            raise ConfigError(f"data.source must be one of {DATA_SOURCES}, got {self.source!r}")
        if self.train_size < 1 or self.test_size < 1:
            raise ConfigError("data sizes must be positive")
        if self.noise < 0:
            raise ConfigError("data.noise must be non-negative")
        if self.source == "idx" and not (self.train_images and self.train_labels):
            raise ConfigError("idx data needs train_images and train_labels")


@dataclass(frozen=True)
class EvalConfig:
    corruptions: bool = True
    corruption_list: tuple = CORRUPTIONS
    shift_max: int = 1
    consistency_size: int = 300
    way: int = 5
    shots: int = 5
    queries: int = 10
    episodes: int = 20

    _section = "eval"
    _types = {"corruptions": bool, "shift_max": int, "consistency_size": int, "way": int, "shots": int,
              "queries": int, "episodes": int}

    def __post_init__(self):
        object.__setattr__(self, "corruption_list", tuple(self.corruption_list))
        bad = [c for c in self.corruption_list if c not in CORRUPTIONS]
        if bad:
            raise ConfigError(f"unknown corruptions {bad}")
        if self.shift_max < 1:
            raise ConfigError("eval.shift_max must be >= 1")
        if min(self.consistency_size, self.way, self.shots, self.queries, self.episodes) < 1:
            raise ConfigError("eval counts must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["corruption_list"] = list(self.corruption_list)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalConfig":
        _check_keys(cls, d, "eval")
        kw = {}
        for k, v in d.items():
            if k == "corruption_list":
                if not isinstance(v, list) or not all(isinstance(c, str) for c in v):
                    raise ConfigError("eval.corruption_list must be a list of strings")
                kw[k] = tuple(v)
            else:
                kw[k] = _typed(v, cls._types[k], f"eval.{k}")
        return cls(**kw)


@dataclass(frozen=True)
class ExperimentConfig:
    arch: ArchSpec = field(default_factory=_desk_arch)
    placement: PlacementConfig = field(default_factory=_desk_placement)
    train: TrainConfig = field(default_factory=TrainConfig)
    data: DataConfig = field(default_factory=DataConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.data.source != "idx":
            if self.arch.num_classes != self.data.num_classes:
                raise ConfigError("arch.num_classes must equal data.num_classes")
            expected = (1, self.data.image_size, self.data.image_size)
            if self.arch.input_shape != expected:
                raise ConfigError(f"arch.input_shape must be {list(expected)} for synthetic data")

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, train=replace(self.train, seed=seed))

    def to_dict(self) -> dict:
        return {
            "arch": self.arch.to_dict(),
            "placement": self.placement.to_dict(),
            "train": self.train.to_dict(),
            "data": self.data.to_dict(),
            "eval": self.eval.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        _check_keys(cls, d, "config")
        kw = {}
        if "arch" in d:
            _check_keys(ArchSpec, d["arch"], "arch")
            kw["arch"] = ArchSpec.from_dict(d["arch"])
        if "placement" in d:
            _check_keys(PlacementConfig, d["placement"], "placement")
            kw["placement"] = PlacementConfig.from_dict(d["placement"])
        for name, section in (("train", TrainConfig), ("data", DataConfig), ("eval", EvalConfig)):
            if name in d:
                kw[name] = section.from_dict(d[name])
        return cls(**kw)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.loads(text)
