"""Hamming(7,4) error-correcting code over GF(2).

Codewords use a systematic layout ``[d0 d1 d2 d3 p0 p1 p2]`` where position
``j`` of the bit vector is bit ``j`` of the integer form (LSB-first). The
parity bits are::

    p0 = d0 ^ d1 ^ d3
    p1 = d0 ^ d2 ^ d3
    p2 = d1 ^ d2 ^ d3

Data words wider than four bits are split into 4-bit chunks (LSB-first, the
last chunk zero-padded at the high end), each chunk encoded on its own and
the 7-bit codewords concatenated in chunk order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DataWord(NamedTuple):
    """An unsigned integer together with its bit width."""

    value: int
    width: int

    def check(self) -> "DataWord":
        if self.width < 1:
            raise ValueError(f"data word width must be >= 1, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")
        return self


def int_to_bits(value: int, width: int) -> np.ndarray:
    """LSB-first bit vector of ``value``."""
    return ((value >> np.arange(width)) & 1).astype(np.uint8)


def bits_to_int(bits) -> int:
    bits = np.asarray(bits, dtype=np.int64)
    return int((bits << np.arange(bits.shape[-1])).sum())


@dataclass(frozen=True)
class HammingCode74:
    """Generator/parity-check matrices and the syndrome lookup for Hamming(7,4).

    ``generator`` is 7x4 so that ``codeword = generator @ data (mod 2)``.
    ``parity_check`` is 3x7 with ``parity_check @ generator = 0 (mod 2)``.
    """

    n: int = 7
    k: int = 4
    generator: np.ndarray = field(init=False, repr=False)
    parity_check: np.ndarray = field(init=False, repr=False)
    syndrome_table: dict = field(init=False, repr=False)
    _decode_lut: np.ndarray = field(init=False, repr=False)
    _encode_lut: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        parity = np.array(
            [[1, 1, 0, 1],
             [1, 0, 1, 1],
             [0, 1, 1, 1]],
            dtype=np.uint8,
        )
        generator = np.vstack([np.eye(4, dtype=np.uint8), parity])
        parity_check = np.hstack([parity, np.eye(3, dtype=np.uint8)])
        for arr in (generator, parity_check):
            arr.setflags(write=False)

        # syndrome value (LSB = row 0) -> erroneous position
        table = {bits_to_int(parity_check[:, j]): j for j in range(self.n)}

        encode_lut = np.array(
            [bits_to_int(generator @ int_to_bits(d, self.k) % 2) for d in range(1 << self.k)],
            dtype=np.int64,
        )
        decode_lut = np.empty(1 << self.n, dtype=np.int64)
        for w in range(1 << self.n):
            s = bits_to_int(parity_check @ int_to_bits(w, self.n) % 2)
            fixed = w ^ (1 << table[s]) if s else w
            decode_lut[w] = fixed & ((1 << self.k) - 1)
        encode_lut.setflags(write=False)
        decode_lut.setflags(write=False)

        object.__setattr__(self, "generator", generator)
        object.__setattr__(self, "parity_check", parity_check)
        object.__setattr__(self, "syndrome_table", table)
        object.__setattr__(self, "_encode_lut", encode_lut)
        object.__setattr__(self, "_decode_lut", decode_lut)

    def encode4(self, data: int) -> int:
        if not 0 <= data < (1 << self.k):
            raise ValueError(f"data word must be < {1 << self.k}, got {data}")
        return int(self._encode_lut[data])

    def syndrome(self, received: int) -> int:
        bits = int_to_bits(received, self.n)
        return bits_to_int(self.parity_check @ bits % 2)

    def correct_decode7(self, received: int) -> int:
        """Flip the bit named by the syndrome (if any) and return the data bits.

        Two or more bit errors are silently miscorrected.
        """
        if not 0 <= received < (1 << self.n):
            raise ValueError(f"received word must be < {1 << self.n}, got {received}")
        s = self.syndrome(received)
        if s:
            received ^= 1 << self.syndrome_table[s]
        return received & ((1 << self.k) - 1)

    def n_chunks(self, data_width: int) -> int:
        return -(-data_width // self.k)

    def encoded_width(self, data_width: int) -> int:
        return self.n * self.n_chunks(data_width)

    # vectorised forms used by the volume decoders

    def encode_words(self, words: np.ndarray, data_width: int) -> np.ndarray:
        """Chunk-encode integer data words; returns bits with a trailing axis of
        length ``encoded_width(data_width)``."""
        words = np.asarray(words, dtype=np.int64)
        out = []
        for c in range(self.n_chunks(data_width)):
            chunk = (words >> (c * self.k)) & ((1 << self.k) - 1)
            code = self._encode_lut[chunk]
            out.append((code[..., None] >> np.arange(self.n)) & 1)
        return np.concatenate(out, axis=-1).astype(np.uint8)

    def decode_bits(self, bits: np.ndarray, data_width: int) -> np.ndarray:
        """Syndrome-correct each chunk of ``bits`` (channel axis first) and
        return the integer data words."""
        bits = np.asarray(bits)
        expected = self.encoded_width(data_width)
        if bits.shape[0] != expected:
            raise ValueError(
                f"expected {expected} encoded bits for data width {data_width}, got {bits.shape[0]}"
            )
        weights = (1 << np.arange(self.n, dtype=np.int64)).reshape((self.n,) + (1,) * (bits.ndim - 1))
        words = np.zeros(bits.shape[1:], dtype=np.int64)
        for c in range(self.n_chunks(data_width)):
            received = (bits[c * self.n:(c + 1) * self.n].astype(np.int64) * weights).sum(axis=0)
            words |= self._decode_lut[received] << (c * self.k)
        return words & ((1 << data_width) - 1)


HAMMING74 = HammingCode74()


def hamming_encode4(data: int) -> int:
    return HAMMING74.encode4(data)


def hamming_syndrome(received: int) -> int:
    return HAMMING74.syndrome(received)


def hamming_correct_decode7(received: int) -> int:
    return HAMMING74.correct_decode7(received)


def hamming_encode_chunked(data_word: DataWord, code: HammingCode74 = HAMMING74) -> np.ndarray:
    """Encode a data word of any width as a flat LSB-first bit sequence of
    length ``7 * ceil(width / 4)``."""
    value, width = DataWord(*data_word).check()
    return code.encode_words(np.int64(value), width)


def hamming_decode_chunked(bits, data_width: int, code: HammingCode74 = HAMMING74) -> DataWord:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("expected a flat bit sequence")
    value = code.decode_bits(bits, data_width)
    return DataWord(int(value), data_width)
