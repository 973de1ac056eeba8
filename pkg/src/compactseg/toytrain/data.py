"""Synthetic 2D segmentation data: weighted Voronoi label maps with noisy,
blurred one-hot class evidence as the input features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .config import DatasetConfig


@dataclass
class SyntheticDataset:
    config: DatasetConfig
    # per-class cell weight; small weights give small structures
    class_scale: np.ndarray
    train_images: list[np.ndarray]
    train_labels: list[np.ndarray]
    val_images: list[np.ndarray]
    val_labels: list[np.ndarray]
    attempt: int

    @property
    def n_classes(self) -> int:
        return self.config.n_classes

    def split(self, name: str):
        if name == "train":
            return self.train_images, self.train_labels
        if name == "val":
            return self.val_images, self.val_labels
        raise ValueError(f"unknown split {name!r}")


def voronoi_labels(rng: np.random.Generator, class_scale: np.ndarray, height: int, width: int) -> np.ndarray:
    """Multiplicatively weighted Voronoi map: pixel -> argmin_c |x - s_c| / scale_c."""
    n = class_scale.size
    seeds = rng.random((n, 2)) * np.array([height, width])
    yy, xx = np.meshgrid(np.arange(height) + 0.5, np.arange(width) + 0.5, indexing="ij")
    d = np.hypot(yy[None] - seeds[:, 0, None, None], xx[None] - seeds[:, 1, None, None])
    return np.argmin(d / class_scale[:, None, None], axis=0).astype(np.uint16)


def label_features(rng: np.random.Generator, labels: np.ndarray, n_classes: int,
                   noise_sigma: float, blur_sigma: float) -> np.ndarray:
    """``(n_classes, H, W)`` one-hot evidence, blurred then corrupted by Gaussian noise."""
    feats = np.zeros((n_classes,) + labels.shape)
    np.put_along_axis(feats, labels[None].astype(np.int64), 1.0, axis=0)
    if blur_sigma > 0:
        feats = gaussian_filter(feats, sigma=(0, blur_sigma, blur_sigma), mode="nearest")
    if noise_sigma > 0:
        feats = feats + noise_sigma * rng.standard_normal(feats.shape)
    return feats


def generate_synthetic(config: DatasetConfig) -> SyntheticDataset:
    """Seeded dataset in which every class occurs in the training split.

    If a draw misses a class, the next sub-seed is tried, up to
    ``max_attempts`` times.
    """
    config.validate()
    c = config
    for attempt in range(c.max_attempts):
        rng = np.random.default_rng([c.seed, attempt])
        scale = np.exp(c.size_skew * rng.standard_normal(c.n_classes))
        labels = [voronoi_labels(rng, scale, c.height, c.width) for _ in range(c.n_train + c.n_val)]
        seen = np.zeros(c.n_classes, dtype=bool)
        for lab in labels[:c.n_train]:
            seen[np.unique(lab)] = True
        if seen.all():
            break
    else:
        raise ValueError(
            f"no draw covered all {c.n_classes} classes in {c.max_attempts} attempts; "
            "increase n_train or image size, or reduce size_skew"
        )
    images = [label_features(rng, lab, c.n_classes, c.noise_sigma, c.blur_sigma) for lab in labels]
    return SyntheticDataset(
        config=c,
        class_scale=scale,
        train_images=images[:c.n_train],
        train_labels=labels[:c.n_train],
        val_images=images[c.n_train:],
        val_labels=labels[c.n_train:],
        attempt=attempt,
    )
