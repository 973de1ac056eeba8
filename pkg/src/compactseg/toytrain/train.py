"""Training loop, evaluation and end-to-end gradient checks for the toy model."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .. import gradcheck, metrics
from ..codebook import Codebook, Scheme, build_random_codebook, encode_labels, load_codebook
from ..decode import decode
from ..loss import (
    binary_dice_ce_loss,
    cross_entropy_loss,
    dice_ce_loss,
    inverse_frequency_bit_weights,
)
from .config import LossConfig, OptimizerConfig, RunConfig
from .data import SyntheticDataset, generate_synthetic
from .model import ToyModel, _backward, _forward, forward


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"loss became non-finite ({loss}) at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


@dataclass
class LossSpec:
    kind: str = "dice_ce"
    smoothing: float = 1e-5
    class_weights: np.ndarray | None = None
    bit_weights: np.ndarray | None = None


def make_loss_spec(model: ToyModel, dataset: SyntheticDataset, loss: LossConfig) -> LossSpec:
    """Resolve a loss config against the training split.

    ``weighted_ce`` uses inverse-frequency weights: per class for the one-hot
    head, per bit channel otherwise.
    """
    spec = LossSpec(loss.kind, loss.smoothing)
    if loss.kind != "weighted_ce":
        return spec
    labels = np.concatenate([lab.ravel() for lab in dataset.train_labels])
    if model.head == "onehot":
        freq = np.bincount(labels, minlength=model.n_classes) / labels.size
        w = np.ones(model.n_classes)
        w[freq > 0] = 1.0 / freq[freq > 0]
        spec.class_weights = w
    else:
        spec.bit_weights = inverse_frequency_bit_weights(encode_labels(labels, model.codebook))
    return spec


def objective(model: ToyModel, image, labels, spec: LossSpec, params: np.ndarray | None = None):
    """Training loss on one image and its gradient w.r.t. the flat parameters."""
    if params is not None:
        model = ToyModel(model.head, model.n_inputs, model.hidden1, model.hidden2,
                         model.n_classes, model.codebook, model.seed, params)
    labels = np.asarray(labels)
    if model.head == "onehot":
        cache = _forward(model, image, None)
        flat_labels = labels.reshape(-1)
        if spec.kind == "dice_ce":
            value, dp = dice_ce_loss(cache.probs, flat_labels, spec.class_weights, spec.smoothing)
        else:
            value, dp = cross_entropy_loss(cache.probs, flat_labels, spec.class_weights)
    else:
        bits = encode_labels(labels, model.codebook).reshape(model.n_outputs, -1)
        cache = _forward(model, image, bits if model.head == "tree" else None)
        value, dp = binary_dice_ce_loss(cache.probs, bits, spec.bit_weights, spec.smoothing,
                                        include_dice=spec.kind == "dice_ce")
    return value, _backward(model, cache, dp)


def predict_labels(model: ToyModel, image, mode: str = "hard") -> np.ndarray:
    probs = forward(model, image)
    if model.head == "onehot":
        return np.argmax(probs, axis=0).astype(np.uint16)
    return decode(probs, model.codebook, mode)


@dataclass
class EvalResult:
    report: metrics.DscReport
    boundary_error_fraction: float
    voxel_accuracy: float
    size_table: list[metrics.SizeRow]
    predictions: list[np.ndarray] = field(repr=False, default_factory=list)


def evaluate_predictions(predictions, truths, n_classes: int,
                         include_background: bool = True) -> EvalResult:
    report = metrics.evaluate_cases(predictions, truths, n_classes, include_background)
    on_b = wrong = correct = total = 0
    for p, t in zip(predictions, truths):
        b, w = metrics.boundary_error_counts(p, t)
        on_b += b
        wrong += w
        correct += int((np.asarray(p) == np.asarray(t)).sum())
        total += np.asarray(t).size
    return EvalResult(
        report=report,
        boundary_error_fraction=on_b / wrong if wrong else 0.0,
        voxel_accuracy=correct / total,
        size_table=metrics.dsc_vs_structure_size(report, truths),
        predictions=list(predictions),
    )


def evaluate(model: ToyModel, dataset: SyntheticDataset, decode_mode: str = "hard",
             split: str = "val", include_background: bool = True) -> EvalResult:
    """Decode every image of a split and score it case-then-cohort.

    The boundary error fraction is pooled over all images of the split.
    """
    images, truths = dataset.split(split)
    preds = [predict_labels(model, img, decode_mode) for img in images]
    return evaluate_predictions(preds, truths, dataset.n_classes, include_background)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    mean_dsc: float | None = None
    class_dsc: dict[int, float | None] | None = None
    boundary_error_fraction: float | None = None


def log_header(n_classes: int) -> list[str]:
    return (["epoch", "loss", "mean_dsc"] + [f"dsc_{c}" for c in range(n_classes)]
            + ["boundary_error_fraction"])


def log_row(rec: EpochRecord, n_classes: int) -> list[str]:
    def fmt(v):
        return "" if v is None else repr(float(v))
    per_class = [fmt(None if rec.class_dsc is None else rec.class_dsc.get(c)) for c in range(n_classes)]
    return [str(rec.epoch), fmt(rec.loss), fmt(rec.mean_dsc)] + per_class + [fmt(rec.boundary_error_fraction)]


def train(model: ToyModel, dataset: SyntheticDataset, loss_config: LossConfig,
          optimizer_config: OptimizerConfig, eval_every: int = 1, eval_mode: str = "hard",
          log_path=None, progress=None) -> tuple[ToyModel, list[EpochRecord]]:
    """Plain mini-batch gradient descent; returns the trained model and the epoch log.

    Each epoch visits the training images in a seeded random order. The
    reported epoch loss is the mean per-image loss seen during that epoch.
    With ``log_path`` the log is appended to a CSV as epochs finish.
    Raises :class:`TrainingDiverged` if the loss stops being finite.
    """
    if not dataset.train_images:
        raise ValueError("empty training set")
    opt = optimizer_config
    spec = make_loss_spec(model, dataset, loss_config)
    rng = np.random.default_rng(opt.seed)
    model = model.copy()
    n = len(dataset.train_images)
    log: list[EpochRecord] = []
    writer = fh = None
    if log_path is not None:
        fh = open(log_path, "a", newline="")
        writer = csv.writer(fh)
        if fh.tell() == 0:
            writer.writerow(log_header(dataset.n_classes))
    try:
        for epoch in range(1, opt.epochs + 1):
            order = rng.permutation(n)
            losses = []
            for start in range(0, n, opt.batch_size):
                batch = order[start:start + opt.batch_size]
                grad = np.zeros(model.n_params)
                for i in batch:
                    v, g = objective(model, dataset.train_images[i], dataset.train_labels[i], spec)
                    losses.append(v)
                    grad += g
                if not (math.isfinite(losses[-1]) and np.all(np.isfinite(grad))):
                    raise TrainingDiverged(epoch, losses[-1])
                model.params -= opt.lr * grad / len(batch)
            rec = EpochRecord(epoch, float(np.mean(losses)))
            if not math.isfinite(rec.loss):
                raise TrainingDiverged(epoch, rec.loss)
            if dataset.val_images and (epoch % eval_every == 0 or epoch == opt.epochs):
                ev = evaluate(model, dataset, eval_mode)
                rec.mean_dsc = ev.report.cohort_mean
                rec.class_dsc = {c: ev.report.class_mean(c) for c in range(dataset.n_classes)}
                rec.boundary_error_fraction = ev.boundary_error_fraction
            log.append(rec)
            if writer is not None:
                writer.writerow(log_row(rec, dataset.n_classes))
                fh.flush()
            if progress is not None:
                progress(rec)
    finally:
        if fh is not None:
            fh.close()
    return model, log


def resolve_codebook(config: RunConfig) -> Codebook | None:
    """Codebook for the configured head: loaded from file or drawn at random."""
    head = config.model.head
    if head == "onehot":
        return None
    scheme = Scheme.HAMMING74 if head == "hamming" else Scheme.VANILLA
    if config.codebook.path:
        cb = load_codebook(config.codebook.path)
        if cb.scheme is not scheme:
            # assignments are scheme-independent data words
            cb = Codebook(cb.n_classes, cb.n_data_bits, scheme, cb.assignment, cb.background_class)
        return cb
    return build_random_codebook(config.dataset.n_classes, scheme, config.codebook.seed)


def build_model(config: RunConfig, codebook: Codebook | None = None) -> ToyModel:
    m = config.model
    if codebook is None:
        codebook = resolve_codebook(config)
    return ToyModel(m.head, config.dataset.n_classes, m.hidden1, m.hidden2,
                    config.dataset.n_classes, codebook, m.seed)


def run(config: RunConfig, dataset: SyntheticDataset | None = None, log_path=None,
        progress=None) -> tuple[ToyModel, list[EpochRecord], SyntheticDataset]:
    """Build data, codebook and model from a config and train."""
    config.validate()
    if dataset is None:
        dataset = generate_synthetic(config.dataset)
    model = build_model(config)
    model, log = train(model, dataset, config.loss, config.optimizer, config.eval_every,
                       config.eval_mode, log_path, progress)
    return model, log, dataset


def head_gradcheck(head: str, loss_kind: str = "dice_ce", seed: int = 0, n_classes: int = 8,
                   size: int = 4, hidden: int = 3,
                   tolerance: float = 1e-5) -> gradcheck.GradCheckResult:
    """Finite-difference check of the full training objective w.r.t. every
    parameter on a random ``size x size`` image (tree head in teacher-forcing
    mode)."""
    rng = np.random.default_rng(seed)
    scheme = Scheme.HAMMING74 if head == "hamming" else Scheme.VANILLA
    cb = None if head == "onehot" else build_random_codebook(n_classes, scheme, seed)
    model = ToyModel(head, n_classes, hidden, hidden, n_classes, cb, seed)
    model.params = model.params + 0.1 * rng.standard_normal(model.n_params)
    image = rng.standard_normal((n_classes, size, size))
    labels = rng.integers(0, n_classes, size=(size, size))
    spec = LossSpec(loss_kind)
    if loss_kind == "weighted_ce":
        if head == "onehot":
            spec.class_weights = rng.uniform(0.5, 2.0, n_classes)
        else:
            spec.bit_weights = rng.uniform(0.5, 2.0, (model.n_outputs, 2))
    return gradcheck.check(
        f"{head}/{loss_kind}",
        lambda p: objective(model, image, labels, spec, params=p),
        model.params, tolerance,
    )
