"""A fixed two-layer convolutional trunk with interchangeable output heads.

Trunk: 1x1 convolution + tanh, then 3x3 convolution (zero padded) + tanh.
Heads, all acting pointwise on the trunk features ``f``:

* ``onehot``  - linear map to ``n_classes`` logits, softmax
* ``binary``  - linear map to ``n_data_bits`` logits, sigmoid
* ``hamming`` - linear map to ``n_encoded_bits`` logits, sigmoid
* ``tree``    - channel ``k`` uses one of ``2**k`` weight vectors picked by the
  integer formed from bits ``0..k-1`` (LSB-first); those bits come from the
  ground truth when teacher bits are given, otherwise from the model's own
  thresholded predictions, channel by channel.

All parameters live in one flat float64 vector; backprop is written out by
hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..codebook import Codebook, Scheme
from ..decode import DEFAULT_THRESHOLD


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softmax(z):
    e = np.exp(z - z.max(axis=0, keepdims=True))
    return e / e.sum(axis=0, keepdims=True)


def im2col3(x: np.ndarray) -> np.ndarray:
    """``(C, H, W)`` -> ``(C*9, H*W)`` columns of zero-padded 3x3 neighbourhoods."""
    c, h, w = x.shape
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1)))
    win = np.lib.stride_tricks.sliding_window_view(padded, (3, 3), axis=(1, 2))
    return win.transpose(0, 3, 4, 1, 2).reshape(c * 9, h * w)


def col2im3(cols: np.ndarray, shape: tuple[int, int, int]) -> np.ndarray:
    """Adjoint of :func:`im2col3`."""
    c, h, w = shape
    cols = cols.reshape(c, 3, 3, h, w)
    padded = np.zeros((c, h + 2, w + 2))
    for dy in range(3):
        for dx in range(3):
            padded[:, dy:dy + h, dx:dx + w] += cols[:, dy, dx]
    return padded[:, 1:-1, 1:-1]


def head_outputs(head: str, n_classes: int, codebook: Codebook | None) -> int:
    if head == "onehot":
        return n_classes
    if codebook is None:
        raise ValueError(f"{head} head needs a codebook")
    if codebook.n_classes != n_classes:
        raise ValueError(f"codebook has {codebook.n_classes} classes, model {n_classes}")
    if head in ("binary", "tree"):
        if codebook.scheme is not Scheme.VANILLA:
            raise ValueError(f"{head} head needs a vanilla codebook")
        return codebook.n_data_bits
    if head == "hamming":
        if codebook.scheme is not Scheme.HAMMING74:
            raise ValueError("hamming head needs a hamming74 codebook")
        return codebook.n_encoded_bits
    raise ValueError(f"unknown head {head!r}")


class ToyModel:
    def __init__(self, head: str, n_inputs: int, hidden1: int, hidden2: int, n_classes: int,
                 codebook: Codebook | None = None, seed: int = 0, params: np.ndarray | None = None):
        self.head = head
        self.n_inputs = n_inputs
        self.hidden1 = hidden1
        self.hidden2 = hidden2
        self.n_classes = n_classes
        self.codebook = None if head == "onehot" else codebook
        self.n_outputs = head_outputs(head, n_classes, codebook)
        self.seed = seed

        layout = [
            ("w1", (hidden1, n_inputs), n_inputs),
            ("b1", (hidden1,), None),
            ("w2", (hidden2, hidden1 * 9), hidden1 * 9),
            ("b2", (hidden2,), None),
        ]
        if head == "tree":
            layout.append(("bank", ((1 << self.n_outputs) - 1, hidden2 + 1), hidden2))
        else:
            layout += [("wh", (self.n_outputs, hidden2), hidden2), ("bh", (self.n_outputs,), None)]
        self.layout = layout
        self.n_params = sum(int(np.prod(shape)) for _, shape, _ in layout)

        if params is None:
            rng = np.random.default_rng(seed)
            params = np.zeros(self.n_params)
            off = 0
            for _, shape, fan_in in layout:
                size = int(np.prod(shape))
                if fan_in is not None:
                    params[off:off + size] = rng.standard_normal(size) / np.sqrt(fan_in)
                off += size
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {params.shape}")
        self.params = params.copy()

    def views(self, flat: np.ndarray | None = None) -> dict[str, np.ndarray]:
        """Named reshaped views into ``flat`` (defaults to the model's parameters)."""
        flat = self.params if flat is None else flat
        out, off = {}, 0
        for name, shape, _ in self.layout:
            size = int(np.prod(shape))
            out[name] = flat[off:off + size].reshape(shape)
            off += size
        return out

    def bank_sizes(self) -> list[int]:
        """Number of weight vectors per tree channel: 1, 2, 4, ..."""
        if self.head != "tree":
            raise ValueError("only the tree head has weight banks")
        return [1 << k for k in range(self.n_outputs)]

    def copy(self) -> "ToyModel":
        return ToyModel(self.head, self.n_inputs, self.hidden1, self.hidden2, self.n_classes,
                        self.codebook, self.seed, self.params)

    def meta(self) -> dict:
        return {
            "head": self.head, "n_inputs": self.n_inputs, "hidden1": self.hidden1,
            "hidden2": self.hidden2, "n_classes": self.n_classes, "seed": self.seed,
            "codebook": None if self.codebook is None else self.codebook.to_dict(),
        }

    def save(self, path, extra: dict | None = None) -> None:
        meta = self.meta()
        if extra:
            meta["extra"] = extra
        with open(path, "wb") as f:
            np.savez(f, params=self.params, meta=np.array(json.dumps(meta, sort_keys=True)))

    @classmethod
    def load(cls, path) -> tuple["ToyModel", dict]:
        with np.load(path, allow_pickle=False) as z:
            params = z["params"]
            meta = json.loads(str(z["meta"]))
        cb = None if meta["codebook"] is None else Codebook.from_dict(meta["codebook"])
        model = cls(meta["head"], meta["n_inputs"], meta["hidden1"], meta["hidden2"],
                    meta["n_classes"], cb, meta["seed"], params)
        return model, meta.get("extra", {})


@dataclass
class _Cache:
    shape: tuple[int, int]
    x: np.ndarray
    h1: np.ndarray
    cols: np.ndarray
    f: np.ndarray
    probs: np.ndarray
    index: np.ndarray | None = None  # tree: bank row per channel and pixel


def _forward(model: ToyModel, image: np.ndarray, teacher_bits: np.ndarray | None) -> _Cache:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[0] != model.n_inputs:
        raise ValueError(f"expected image of shape ({model.n_inputs}, H, W), got {image.shape}")
    _, h, w = image.shape
    v = model.views()
    x = image.reshape(model.n_inputs, -1)
    h1 = np.tanh(v["w1"] @ x + v["b1"][:, None])
    cols = im2col3(h1.reshape(model.hidden1, h, w))
    f = np.tanh(v["w2"] @ cols + v["b2"][:, None])

    if model.head != "tree":
        z = v["wh"] @ f + v["bh"][:, None]
        probs = _softmax(z) if model.head == "onehot" else _sigmoid(z)
        return _Cache((h, w), x, h1, cols, f, probs)

    bank = v["bank"]
    n_bits = model.n_outputs
    fa = np.vstack([f, np.ones((1, f.shape[1]))])
    probs = np.empty((n_bits, f.shape[1]))
    index = np.empty((n_bits, f.shape[1]), dtype=np.int64)
    prefix = np.zeros(f.shape[1], dtype=np.int64)
    if teacher_bits is not None:
        teacher = np.asarray(teacher_bits).reshape(n_bits, -1).astype(np.int64)
        if teacher.shape[1] != f.shape[1]:
            raise ValueError("teacher bits do not match the image size")
    for k in range(n_bits):
        index[k] = (1 << k) - 1 + prefix
        z = np.einsum("ij,ji->i", bank[index[k]], fa)
        probs[k] = _sigmoid(z)
        bit = teacher[k] if teacher_bits is not None else (probs[k] >= DEFAULT_THRESHOLD)
        prefix = prefix | (bit.astype(np.int64) << k)
    return _Cache((h, w), x, h1, cols, f, probs, index)


def forward(model: ToyModel, image, codebook: Codebook | None = None, teacher_bits=None,
            training: bool = False) -> np.ndarray:
    """Head probabilities of shape ``(n_outputs, H, W)``.

    The tree head conditions on ``teacher_bits`` when given; in training mode
    they are required.
    """
    if codebook is not None and model.head != "onehot":
        head_outputs(model.head, model.n_classes, codebook)
        if codebook.n_encoded_bits != model.n_outputs:
            raise ValueError(
                f"codebook has {codebook.n_encoded_bits} channels, head {model.n_outputs}"
            )
    if training and model.head == "tree" and teacher_bits is None:
        raise ValueError("tree head needs teacher bits in training mode")
    cache = _forward(model, image, teacher_bits)
    return cache.probs.reshape((model.n_outputs,) + cache.shape)


def _backward(model: ToyModel, cache: _Cache, dprobs: np.ndarray) -> np.ndarray:
    grad = np.zeros(model.n_params)
    g = model.views(grad)
    v = model.views()
    p = cache.probs
    if model.head == "onehot":
        dz = p * (dprobs - (dprobs * p).sum(axis=0, keepdims=True))
    else:
        dz = dprobs * p * (1.0 - p)

    if model.head == "tree":
        bank = v["bank"]
        fa = np.vstack([cache.f, np.ones((1, cache.f.shape[1]))])
        df = np.zeros_like(cache.f)
        n_pix = fa.shape[1]
        for k in range(model.n_outputs):
            idx = cache.index[k]
            rows = (1 << k) - 1
            sel = np.zeros((1 << k, n_pix))
            sel[idx - rows, np.arange(n_pix)] = dz[k]
            g["bank"][rows:rows + (1 << k)] += sel @ fa.T
            df += bank[idx, :-1].T * dz[k]
    else:
        g["wh"][...] = dz @ cache.f.T
        g["bh"][...] = dz.sum(axis=1)
        df = v["wh"].T @ dz

    da2 = df * (1.0 - cache.f ** 2)
    g["w2"][...] = da2 @ cache.cols.T
    g["b2"][...] = da2.sum(axis=1)
    dcols = v["w2"].T @ da2
    dh1 = col2im3(dcols, (model.hidden1,) + cache.shape).reshape(model.hidden1, -1)
    da1 = dh1 * (1.0 - cache.h1 ** 2)
    g["w1"][...] = da1 @ cache.x.T
    g["b1"][...] = da1.sum(axis=1)
    return grad
