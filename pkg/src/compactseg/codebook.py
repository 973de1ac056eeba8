"""Class-to-codeword assignments for compact label encodings."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ecc import HAMMING74, int_to_bits

FORMAT_VERSION = 1


class Scheme(str, enum.Enum):
    VANILLA = "vanilla"
    HAMMING74 = "hamming74"


def required_data_bits(n_classes: int) -> int:
    """Number of bits needed to give ``n_classes`` distinct binary words."""
    if n_classes < 2:
        raise ValueError(f"need at least 2 classes, got {n_classes}")
    return (n_classes - 1).bit_length()


def required_hamming_bits(n_classes: int) -> int:
    return HAMMING74.encoded_width(required_data_bits(n_classes))


def encoded_width(scheme: Scheme | str, n_data_bits: int) -> int:
    scheme = Scheme(scheme)
    if scheme is Scheme.VANILLA:
        return n_data_bits
    return HAMMING74.encoded_width(n_data_bits)


def memory_reduction_factor(n_classes: int, scheme: Scheme | str) -> Fraction:
    """Ratio of one-hot output channels to compact output channels."""
    return Fraction(n_classes, encoded_width(scheme, required_data_bits(n_classes)))


@dataclass(frozen=True)
class Codebook:
    """Injective map from class index to data word, plus the encoding scheme.

    Data words absent from ``assignment`` are unused; hard decoding maps them
    to ``background_class``.
    """

    n_classes: int
    n_data_bits: int
    scheme: Scheme
    assignment: tuple[int, ...]
    background_class: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "assignment", tuple(int(w) for w in self.assignment))
        if self.n_classes < 2:
            raise ValueError(f"need at least 2 classes, got {self.n_classes}")
        if self.n_data_bits < required_data_bits(self.n_classes):
            raise ValueError(
                f"{self.n_data_bits} data bits cannot hold {self.n_classes} classes"
            )
        if len(self.assignment) != self.n_classes:
            raise ValueError(
                f"assignment has {len(self.assignment)} entries for {self.n_classes} classes"
            )
        limit = 1 << self.n_data_bits
        if any(not 0 <= w < limit for w in self.assignment):
            raise ValueError(f"assignment words must lie in [0, {limit})")
        if len(set(self.assignment)) != self.n_classes:
            raise ValueError("assignment is not injective")
        if not 0 <= self.background_class < self.n_classes:
            raise ValueError(f"background class {self.background_class} out of range")

    @property
    def n_encoded_bits(self) -> int:
        return encoded_width(self.scheme, self.n_data_bits)

    @property
    def words(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64)

    def class_lookup(self) -> np.ndarray:
        """Array over all ``2**n_data_bits`` words giving the class, or -1 if unused."""
        lut = np.full(1 << self.n_data_bits, -1, dtype=np.int64)
        lut[self.words] = np.arange(self.n_classes)
        return lut

    def class_of_word(self, word: int) -> int | None:
        try:
            return self.assignment.index(int(word))
        except ValueError:
            return None

    def encode_words(self, words) -> np.ndarray:
        """Encoded bits for integer data words, bit axis last."""
        words = np.asarray(words, dtype=np.int64)
        if self.scheme is Scheme.VANILLA:
            return ((words[..., None] >> np.arange(self.n_data_bits)) & 1).astype(np.uint8)
        return HAMMING74.encode_words(words, self.n_data_bits)

    def decode_bits(self, bits) -> np.ndarray:
        """Data words from crisp encoded bits (channel axis first). For Hamming
        codebooks each chunk is syndrome-corrected first."""
        bits = np.asarray(bits)
        if bits.shape[0] != self.n_encoded_bits:
            raise ValueError(
                f"expected {self.n_encoded_bits} channels, got {bits.shape[0]}"
            )
        if self.scheme is Scheme.HAMMING74:
            return HAMMING74.decode_bits(bits, self.n_data_bits)
        weights = (1 << np.arange(self.n_data_bits, dtype=np.int64))
        weights = weights.reshape((-1,) + (1,) * (bits.ndim - 1))
        return (bits.astype(np.int64) * weights).sum(axis=0)

    def codeword_matrix(self) -> np.ndarray:
        """``(n_classes, n_encoded_bits)`` array of every class's encoded bits."""
        return self.encode_words(self.words)

    def with_assignment(self, assignment) -> "Codebook":
        return Codebook(self.n_classes, self.n_data_bits, self.scheme, tuple(assignment),
                        self.background_class)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n_classes": self.n_classes,
            "n_data_bits": self.n_data_bits,
            "scheme": self.scheme.value,
            "background_class": self.background_class,
            "bit_order": "lsb_first",
            "assignment": list(self.assignment),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported codebook format_version {version!r}")
        try:
            return cls(
                n_classes=int(d["n_classes"]),
                n_data_bits=int(d["n_data_bits"]),
                scheme=Scheme(d["scheme"]),
                assignment=tuple(d["assignment"]),
                background_class=int(d.get("background_class", 0)),
            )
        except KeyError as e:
            raise ValueError(f"codebook is missing field {e.args[0]!r}") from None


def save_codebook(codebook: Codebook, path) -> None:
    Path(path).write_text(json.dumps(codebook.to_dict(), indent=1) + "\n")


def load_codebook(path) -> Codebook:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: line {e.lineno}: {e.msg}") from None
    return Codebook.from_dict(d)


def identity_codebook(n_classes: int, scheme: Scheme | str = Scheme.VANILLA,
                      n_data_bits: int | None = None) -> Codebook:
    nb = required_data_bits(n_classes) if n_data_bits is None else n_data_bits
    return Codebook(n_classes, nb, Scheme(scheme), tuple(range(n_classes)))


def build_random_codebook(n_classes: int, scheme: Scheme | str, seed: int,
                          n_data_bits: int | None = None,
                          background_class: int = 0) -> Codebook:
    """Seeded uniform random injection of classes into data words."""
    nb = required_data_bits(n_classes) if n_data_bits is None else n_data_bits
    rng = np.random.default_rng(seed)
    words = rng.choice(1 << nb, size=n_classes, replace=False)
    return Codebook(n_classes, nb, Scheme(scheme), tuple(int(w) for w in words),
                    background_class)


def encode_label(codebook: Codebook, class_index: int) -> np.ndarray:
    """Encoded bits of one class, LSB-first."""
    if not 0 <= class_index < codebook.n_classes:
        raise ValueError(f"class {class_index} out of range for {codebook.n_classes} classes")
    return codebook.encode_words(codebook.assignment[class_index])


def decode_word(codebook: Codebook, bits) -> int | None:
    """Class whose data word the (crisp) encoded ``bits`` carry, or None if unused."""
    word = int(codebook.decode_bits(np.asarray(bits, dtype=np.uint8)))
    return codebook.class_of_word(word)


def encode_labels(labels, codebook: Codebook) -> np.ndarray:
    """Crisp bit volume of shape ``(n_encoded_bits, *labels.shape)``."""
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= codebook.n_classes):
        raise ValueError(f"labels must lie in [0, {codebook.n_classes})")
    bits = codebook.codeword_matrix()[labels]
    return np.moveaxis(bits, -1, 0)


__all__ = [
    "Codebook", "Scheme", "FORMAT_VERSION", "required_data_bits", "required_hamming_bits",
    "memory_reduction_factor", "build_random_codebook", "identity_codebook", "encode_label",
    "decode_word", "encode_labels", "save_codebook", "load_codebook", "int_to_bits",
]
