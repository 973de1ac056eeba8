"""Compact (logarithmic-in-classes) label encodings for multi-class segmentation."""

from .codebook import (
    Codebook,
    Scheme,
    build_random_codebook,
    encode_label,
    encode_labels,
    load_codebook,
    memory_reduction_factor,
    required_data_bits,
    required_hamming_bits,
    save_codebook,
)
from .decode import binarize, corrupt_bits, hard_decode, soft_decode

__version__ = "0.1.0"
