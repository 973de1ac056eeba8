"""Raw volume files with a JSON sidecar header.

Label volumes are little-endian uint16, probability volumes little-endian
float32 stored channel-major (one full spatial plane per channel). Spatial
data is written x-fastest: an in-memory array indexed ``[x, y, z]`` is
serialised in Fortran order. The header lives at ``<path>.json``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def header_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _as_3d(arr: np.ndarray) -> np.ndarray:
    if arr.ndim > 3:
        raise ValueError(f"spatial dims must be at most 3, got {arr.ndim}")
    return arr.reshape(arr.shape + (1,) * (3 - arr.ndim))


def write_label_volume(path, labels) -> None:
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() > np.iinfo(np.uint16).max):
        raise ValueError("labels do not fit in uint16")
    vol = _as_3d(labels.astype("<u2"))
    Path(path).write_bytes(vol.tobytes(order="F"))
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "labels",
        "dims": list(vol.shape),
        "dtype": "uint16",
        "byte_order": "little",
        "ordering": "x_fastest",
    }
    header_path(path).write_text(json.dumps(header, indent=1) + "\n")


def write_prob_volume(path, probs) -> None:
    """``probs`` has shape ``(n_channels, x[, y[, z]])``."""
    probs = np.asarray(probs)
    if probs.ndim < 2:
        raise ValueError("probability volume needs a channel axis and spatial axes")
    n_channels = probs.shape[0]
    spatial = _as_3d(probs[0]).shape
    data = probs.astype("<f4").reshape((n_channels,) + spatial)
    with open(path, "wb") as f:
        for c in range(n_channels):
            f.write(data[c].tobytes(order="F"))
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "probabilities",
        "dims": list(spatial),
        "n_channels": n_channels,
        "dtype": "float32",
        "byte_order": "little",
        "ordering": "channel_major_x_fastest",
    }
    header_path(path).write_text(json.dumps(header, indent=1) + "\n")


def read_header(path) -> dict:
    hp = header_path(path)
    try:
        header = json.loads(hp.read_text())
    except FileNotFoundError:
        raise ValueError(f"missing sidecar header {hp}") from None
    except json.JSONDecodeError as e:
        raise ValueError(f"{hp}: line {e.lineno}: {e.msg}") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{hp}: unsupported format_version {header.get('format_version')!r}")
    return header


def read_label_volume(path) -> np.ndarray:
    header = read_header(path)
    if header.get("kind") != "labels":
        raise ValueError(f"{path} is not a label volume")
    dims = tuple(header["dims"])
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<u2")
    if raw.size != int(np.prod(dims)):
        raise ValueError(f"{path}: expected {int(np.prod(dims))} voxels, found {raw.size}")
    return raw.reshape(dims, order="F").astype(np.uint16)


def read_prob_volume(path) -> np.ndarray:
    header = read_header(path)
    if header.get("kind") != "probabilities":
        raise ValueError(f"{path} is not a probability volume")
    dims = tuple(header["dims"])
    n_channels = int(header["n_channels"])
    n_vox = int(np.prod(dims))
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<f4")
    if raw.size != n_channels * n_vox:
        raise ValueError(f"{path}: expected {n_channels * n_vox} values, found {raw.size}")
    out = np.empty((n_channels,) + dims, dtype=np.float32)
    for c in range(n_channels):
        out[c] = raw[c * n_vox:(c + 1) * n_vox].reshape(dims, order="F")
    return out
