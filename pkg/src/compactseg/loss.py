"""Dice and cross-entropy losses on probabilities, with analytic gradients.

Predictions are arrays of shape ``(n_channels, n_voxels)`` (any trailing
spatial shape is flattened). Every function returns ``(value, grad)`` where
``grad`` has the shape of the predictions. Softmax/sigmoid live in the model
head; their Jacobians are applied there.
"""

from __future__ import annotations

import numpy as np

DICE_SMOOTHING = 1e-5
PROB_CLAMP = 1e-7


def _flat(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x.reshape(x.shape[0], -1)


def dice_loss(predictions, targets, smoothing: float = DICE_SMOOTHING):
    """Soft Dice averaged over channels.

    ``1/C * sum_c [1 - (2 sum_i p g + s) / (sum_i p + sum_i g + s)]``
    """
    shape = np.shape(predictions)
    if shape != np.shape(targets):
        raise ValueError(f"shape mismatch: predictions {shape}, targets {np.shape(targets)}")
    p, g = _flat(predictions), _flat(targets)
    n_channels = p.shape[0]
    inter = (p * g).sum(axis=1)
    denom = p.sum(axis=1) + g.sum(axis=1) + smoothing
    num = 2.0 * inter + smoothing
    value = float(np.mean(1.0 - num / denom))
    grad = -(2.0 * g * denom[:, None] - num[:, None]) / (denom[:, None] ** 2) / n_channels
    return value, grad.reshape(shape)


def cross_entropy_loss(predictions, target_labels, class_weights=None):
    """Weight-normalised cross-entropy of the probability at the true class.

    ``sum_i w_{g_i} (-log p_{g_i,i}) / sum_i w_{g_i}``; probabilities are
    clamped to ``[1e-7, 1 - 1e-7]`` before the log.
    """
    shape = np.shape(predictions)
    p = _flat(predictions)
    labels = np.asarray(target_labels).reshape(-1)
    if labels.shape[0] != p.shape[1]:
        raise ValueError(f"shape mismatch: {p.shape[1]} voxels vs {labels.shape[0]} labels")
    n_classes = p.shape[0]
    w = np.ones(n_classes) if class_weights is None else np.asarray(class_weights, dtype=np.float64)
    if w.shape != (n_classes,):
        raise ValueError(f"expected {n_classes} class weights, got shape {w.shape}")
    if np.any(w <= 0):
        raise ValueError("class weights must be strictly positive")
    idx = np.arange(p.shape[1])
    wi = w[labels]
    total_w = wi.sum()
    pt = p[labels, idx]
    clamped = np.clip(pt, PROB_CLAMP, 1.0 - PROB_CLAMP)
    value = float(np.sum(-wi * np.log(clamped)) / total_w)
    grad = np.zeros_like(p)
    inside = (pt > PROB_CLAMP) & (pt < 1.0 - PROB_CLAMP)
    grad[labels, idx] = np.where(inside, -wi / (total_w * clamped), 0.0)
    return value, grad.reshape(shape)


def one_hot(labels, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    out = np.zeros((n_classes,) + labels.shape)
    np.put_along_axis(out, labels[None].astype(np.int64), 1.0, axis=0)
    return out


def dice_ce_loss(predictions, target_labels, class_weights=None, smoothing: float = DICE_SMOOTHING):
    """Multi-class Dice + cross-entropy for a softmax head."""
    p = np.asarray(predictions, dtype=np.float64)
    d, gd = dice_loss(p, one_hot(target_labels, p.shape[0]).reshape(p.shape), smoothing)
    x, gx = cross_entropy_loss(p, target_labels, class_weights)
    return d + x, gd + gx


def binary_dice_ce_loss(bit_predictions, bit_targets, per_bit_weights=None,
                        smoothing: float = DICE_SMOOTHING, include_dice: bool = True):
    """Two-class Dice + CE on every bit channel, averaged over channels.

    Each channel ``k`` is treated as a two-class problem with probabilities
    ``(1 - p_k, p_k)``. ``per_bit_weights`` of shape ``(n_bits, 2)`` holds the
    CE class weights ``(w_zero, w_one)`` per channel. With
    ``include_dice=False`` only the (weighted) binary CE remains.
    """
    shape = np.shape(bit_predictions)
    if shape != np.shape(bit_targets):
        raise ValueError(f"shape mismatch: predictions {shape}, targets {np.shape(bit_targets)}")
    p, t = _flat(bit_predictions), _flat(bit_targets)
    n_bits = p.shape[0]
    if per_bit_weights is not None:
        per_bit_weights = np.asarray(per_bit_weights, dtype=np.float64)
        if per_bit_weights.shape != (n_bits, 2):
            raise ValueError(f"per-bit weights must have shape ({n_bits}, 2)")
    labels = t.round().astype(np.int64)
    value = 0.0
    grad = np.empty_like(p)
    for k in range(n_bits):
        two = np.stack([1.0 - p[k], p[k]])
        w = None if per_bit_weights is None else per_bit_weights[k]
        v, g2 = cross_entropy_loss(two, labels[k], w)
        if include_dice:
            dv, dg = dice_loss(two, np.stack([1.0 - t[k], t[k]]), smoothing)
            v += dv
            g2 = g2 + dg
        value += v
        grad[k] = g2[1] - g2[0]
    return value / n_bits, (grad / n_bits).reshape(shape)


def inverse_frequency_bit_weights(bit_targets) -> np.ndarray:
    """``(n_bits, 2)`` CE weights: ``1/(1-f)`` for zeros, ``1/f`` for ones, where
    ``f`` is the channel's foreground fraction. Degenerate channels get 1."""
    t = _flat(bit_targets)
    f = t.mean(axis=1)
    w = np.ones((t.shape[0], 2))
    ok = (f > 0) & (f < 1)
    w[ok, 0] = 1.0 / (1.0 - f[ok])
    w[ok, 1] = 1.0 / f[ok]
    return w
