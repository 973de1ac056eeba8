"""Run configuration shared by the training harness and the CLI."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

FORMAT_VERSION = 1
HEADS = ("onehot", "binary", "hamming", "tree")
LOSS_KINDS = ("dice_ce", "weighted_ce")


@dataclass
class DatasetConfig:
    n_classes: int = 27
    height: int = 64
    width: int = 64
    n_train: int = 16
    n_val: int = 8
    noise_sigma: float = 0.2
    blur_sigma: float = 1.0
    # log-normal spread of the Voronoi cell weights; 0 gives equal-weight cells
    size_skew: float = 0.6
    seed: int = 0
    max_attempts: int = 50

    def validate(self) -> None:
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if min(self.height, self.width, self.n_train) < 1 or self.n_val < 0:
            raise ValueError("image size and split sizes must be positive")
        if self.noise_sigma < 0 or self.blur_sigma < 0 or self.size_skew < 0:
            raise ValueError("noise_sigma, blur_sigma and size_skew must be non-negative")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass
class ModelConfig:
    head: str = "binary"
    hidden1: int = 32
    hidden2: int = 32
    seed: int = 0

    def validate(self) -> None:
        if self.head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}, got {self.head!r}")
        if min(self.hidden1, self.hidden2) < 1:
            raise ValueError("hidden widths must be positive")


@dataclass
class CodebookConfig:
    # path to a codebook file; None draws a random assignment from ``seed``
    path: str | None = None
    seed: int = 0


@dataclass
class LossConfig:
    kind: str = "dice_ce"
    smoothing: float = 1e-5

    def validate(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"loss kind must be one of {LOSS_KINDS}, got {self.kind!r}")
        if self.smoothing <= 0:
            raise ValueError("smoothing must be positive")


@dataclass
class OptimizerConfig:
    lr: float = 1.0
    epochs: int = 120
    batch_size: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.lr <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("lr, epochs and batch_size must be positive")


@dataclass
class RunConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    codebook: CodebookConfig = field(default_factory=CodebookConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    eval_mode: str = "hard"
    # validation DSC is computed every ``eval_every`` epochs and at the last one
    eval_every: int = 40

    def validate(self) -> "RunConfig":
        self.dataset.validate()
        self.model.validate()
        self.loss.validate()
        self.optimizer.validate()
        if self.eval_mode not in ("hard", "soft"):
            raise ValueError(f"eval_mode must be 'hard' or 'soft', got {self.eval_mode!r}")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")
        return self

    def with_head(self, head: str) -> "RunConfig":
        return dataclasses.replace(self, model=dataclasses.replace(self.model, head=head))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["format_version"] = FORMAT_VERSION
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        version = d.pop("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported config format_version {version!r}")
        sections = {
            "dataset": DatasetConfig, "model": ModelConfig, "codebook": CodebookConfig,
            "loss": LossConfig, "optimizer": OptimizerConfig,
        }
        kwargs = {}
        for key, value in d.items():
            if key in sections:
                kwargs[key] = _build(sections[key], value, key)
            elif key in ("eval_mode", "eval_every"):
                kwargs[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**kwargs).validate()


def _build(klass, values: dict, section: str):
    names = {f.name for f in dataclasses.fields(klass)}
    unknown = set(values) - names
    if unknown:
        raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")
    return klass(**values)


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: line {e.lineno}: {e.msg}") from None
    return RunConfig.from_dict(d)


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=1) + "\n")


def bundled_config(name: str) -> RunConfig:
    """One of the configurations shipped with the package (``standard``, ``noiseless``)."""
    text = resources.files("compactseg.configs").joinpath(f"{name}.json").read_text()
    return RunConfig.from_dict(json.loads(text))
