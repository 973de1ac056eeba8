"""Turn per-channel probability volumes back into class labels.

Probability volumes are arrays of shape ``(n_channels, *spatial)``. All
decoders are per-voxel maps; they walk the flattened voxels in fixed-size
blocks so memory stays bounded on large volumes, and the result does not
depend on the block size.
"""

from __future__ import annotations

import numpy as np

from .codebook import Codebook

DEFAULT_THRESHOLD = 0.5
BLOCK_VOXELS = 1 << 16


def binarize(probs, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """1 where ``p >= threshold``; a value exactly at the threshold maps to 1."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    return (np.asarray(probs) >= threshold).astype(np.uint8)


def _check_channels(probs: np.ndarray, codebook: Codebook) -> None:
    if probs.ndim < 1 or probs.shape[0] != codebook.n_encoded_bits:
        got = probs.shape[0] if probs.ndim else 0
        raise ValueError(
            f"channel count mismatch: codebook expects {codebook.n_encoded_bits} "
            f"channels, volume has {got}"
        )


def _blocks(n: int, block: int):
    for start in range(0, n, block):
        yield slice(start, min(start + block, n))


def hard_decode(probs, codebook: Codebook, threshold: float = DEFAULT_THRESHOLD,
                block_voxels: int = BLOCK_VOXELS) -> np.ndarray:
    """Threshold, syndrome-correct (Hamming only), then look the word up.

    Words that no class owns decode to ``codebook.background_class``.
    """
    probs = np.asarray(probs)
    _check_channels(probs, codebook)
    spatial = probs.shape[1:]
    flat = probs.reshape(probs.shape[0], -1)
    lut = codebook.class_lookup()
    lut[lut < 0] = codebook.background_class
    out = np.empty(flat.shape[1], dtype=np.uint16)
    for sl in _blocks(flat.shape[1], block_voxels):
        words = codebook.decode_bits(binarize(flat[:, sl], threshold))
        out[sl] = lut[words]
    return out.reshape(spatial)


def soft_decode(probs, codebook: Codebook, block_voxels: int = BLOCK_VOXELS) -> np.ndarray:
    """Nearest codeword in Euclidean distance, scanning every class.

    Ties go to the lowest class index.
    """
    probs = np.asarray(probs)
    _check_channels(probs, codebook)
    spatial = probs.shape[1:]
    flat = probs.reshape(probs.shape[0], -1)
    codes = codebook.codeword_matrix().astype(np.float64)
    out = np.empty(flat.shape[1], dtype=np.uint16)
    for sl in _blocks(flat.shape[1], block_voxels):
        p = flat[:, sl].astype(np.float64)
        best = np.full(p.shape[1], np.inf)
        arg = np.zeros(p.shape[1], dtype=np.uint16)
        for c in range(codebook.n_classes):
            d = ((p - codes[c][:, None]) ** 2).sum(axis=0)
            closer = d < best
            best[closer] = d[closer]
            arg[closer] = c
        out[sl] = arg
    return out.reshape(spatial)


def decode(probs, codebook: Codebook, mode: str = "hard") -> np.ndarray:
    if mode == "hard":
        return hard_decode(probs, codebook)
    if mode == "soft":
        return soft_decode(probs, codebook)
    raise ValueError(f"unknown decode mode {mode!r}")


def corrupt_bits(bits, flip_probability: float, seed: int) -> tuple[np.ndarray, int]:
    """Flip each bit independently with ``flip_probability``.

    Returns the corrupted volume and the number of flipped bits.
    """
    if not 0.0 <= flip_probability <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {flip_probability}")
    bits = np.asarray(bits)
    rng = np.random.default_rng(seed)
    flips = rng.random(bits.shape) < flip_probability
    out = bits.astype(np.uint8) ^ flips.astype(np.uint8)
    return out.astype(bits.dtype), int(flips.sum())
