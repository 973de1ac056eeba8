"""Adjacency-aware class-to-codeword assignment.

The objective is a quadratic assignment: for every pair of classes that
touch in the training labels, pay ``count * hamming(word_a, word_b)``.
Classes that share long boundaries therefore end up with codewords that
differ in few bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .codebook import Codebook, Scheme, required_data_bits

FORMAT_VERSION = 1


@dataclass
class ClassAdjacencyGraph:
    """Undirected class graph; ``edges[(a, b)]`` with ``a < b`` counts the
    face-neighbour voxel pairs labelled ``{a, b}``."""

    n_classes: int
    edges: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), count in self.edges.items():
            a, b, count = int(a), int(b), int(count)
            if a == b:
                raise ValueError(f"self-loop on class {a}")
            if count < 1:
                raise ValueError(f"edge ({a}, {b}) has non-positive count {count}")
            if not (0 <= a < self.n_classes and 0 <= b < self.n_classes):
                raise ValueError(f"edge ({a}, {b}) outside {self.n_classes} classes")
            key = (min(a, b), max(a, b))
            clean[key] = clean.get(key, 0) + count
        self.edges = dict(sorted(clean.items()))

    def weight_matrix(self, binary: bool = False) -> np.ndarray:
        w = np.zeros((self.n_classes, self.n_classes), dtype=np.int64)
        for (a, b), count in self.edges.items():
            w[a, b] = w[b, a] = 1 if binary else count
        return w

    def merge(self, other: "ClassAdjacencyGraph") -> "ClassAdjacencyGraph":
        n = max(self.n_classes, other.n_classes)
        edges = dict(self.edges)
        for k, v in other.edges.items():
            edges[k] = edges.get(k, 0) + v
        return ClassAdjacencyGraph(n, edges)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n_classes": self.n_classes,
            "connectivity": "face",
            "edges": [[a, b, c] for (a, b), c in self.edges.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassAdjacencyGraph":
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported adjacency format_version {d.get('format_version')!r}")
        return cls(int(d["n_classes"]), {(a, b): c for a, b, c in d["edges"]})

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "ClassAdjacencyGraph":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _volume_edges(labels: np.ndarray, n_classes: int) -> dict[tuple[int, int], int]:
    labels = labels.astype(np.int64)
    keys = []
    for axis in range(labels.ndim):
        if labels.shape[axis] < 2:
            continue
        lo = np.take(labels, np.arange(labels.shape[axis] - 1), axis=axis).ravel()
        hi = np.take(labels, np.arange(1, labels.shape[axis]), axis=axis).ravel()
        diff = lo != hi
        a, b = np.minimum(lo[diff], hi[diff]), np.maximum(lo[diff], hi[diff])
        keys.append(a * n_classes + b)
    if not keys:
        return {}
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    return {(int(k // n_classes), int(k % n_classes)): int(c) for k, c in zip(uniq, counts)}


def build_adjacency(volumes, n_classes: int | None = None) -> ClassAdjacencyGraph:
    """Count face-neighbour pairs with different labels over all volumes.

    Face neighbours along every array axis are used, so a 3D volume gets
    6-connectivity and a 2D image 4-connectivity.
    """
    volumes = [np.asarray(v) for v in volumes]
    if not volumes:
        raise ValueError("need at least one label volume")
    top = max(int(v.max()) for v in volumes if v.size) + 1
    if n_classes is None:
        n_classes = top
    elif top > n_classes:
        raise ValueError(f"label {top - 1} out of range for {n_classes} classes")
    graph = ClassAdjacencyGraph(n_classes)
    for v in volumes:
        graph = graph.merge(ClassAdjacencyGraph(n_classes, _volume_edges(v, n_classes)))
    return graph


def _popcount_matrix(n_words: int) -> np.ndarray:
    x = np.arange(n_words)
    xor = x[:, None] ^ x[None, :]
    return np.array([bin(v).count("1") for v in range(n_words)], dtype=np.int64)[xor]


def assignment_cost(graph: ClassAdjacencyGraph, codebook: Codebook, binary: bool = False) -> int:
    if graph.n_classes > codebook.n_classes:
        raise ValueError(
            f"codebook covers {codebook.n_classes} classes, graph has {graph.n_classes}"
        )
    words = codebook.assignment
    total = 0
    for (a, b), count in graph.edges.items():
        total += (1 if binary else count) * bin(words[a] ^ words[b]).count("1")
    return total


@dataclass(frozen=True)
class AssignmentResult:
    codebook: Codebook
    cost: int
    initial_cost: int
    iterations: int
    seed: int


def _greedy(weights: np.ndarray, dist: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = weights.shape[0]
    n_words = dist.shape[0]
    degree = weights.sum(axis=1)
    tiebreak = rng.permutation(n)
    words = np.full(n, -1, dtype=np.int64)
    free = np.ones(n_words, dtype=bool)

    # highest-degree class first, on a seeded word
    first = int(np.lexsort((tiebreak, -degree))[0])
    words[first] = int(rng.integers(n_words))
    free[words[first]] = False
    placed = np.zeros(n, dtype=bool)
    placed[first] = True

    for _ in range(n - 1):
        links = (weights[:, placed] > 0).sum(axis=1)
        strength = weights[:, placed].sum(axis=1)
        order = np.lexsort((tiebreak, -degree, -strength, -links))
        c = int(next(i for i in order if not placed[i]))
        nbrs = np.flatnonzero(placed & (weights[c] > 0))
        inc = weights[c, nbrs] @ dist[words[nbrs]] if nbrs.size else np.zeros(n_words, np.int64)
        inc = np.where(free, inc, np.iinfo(np.int64).max)
        w = int(np.argmin(inc))
        words[c] = w
        free[w] = False
        placed[c] = True
    return words


def _local_search(weights, dist, words, rng, max_iterations):
    """Best-improvement swaps of a class with another class or an unused word.

    Returns the number of applied swaps.
    """
    n = weights.shape[0]
    n_words = dist.shape[0]
    owner = np.full(n_words, -1, dtype=np.int64)
    owner[words] = np.arange(n)
    iterations = 0
    improved = True
    while improved and iterations < max_iterations:
        improved = False
        for a in rng.permutation(n):
            if iterations >= max_iterations:
                break
            # f[c, x]: cost of class c's edges if c sat on word x, others fixed
            f = weights @ dist[words]
            u = words[a]
            delta = f[a] - f[a, u]
            occ = owner >= 0
            b = owner[occ]
            delta[occ] += f[b, u] - f[b, np.flatnonzero(occ)] + 2 * weights[a, b] * dist[u, occ]
            delta[u] = 0
            v = int(np.argmin(delta))
            if delta[v] >= 0:
                continue
            b = owner[v]
            words[a] = v
            owner[v] = a
            owner[u] = b
            if b >= 0:
                words[b] = u
            iterations += 1
            improved = True
    return iterations


def optimize_assignment(graph: ClassAdjacencyGraph, scheme: Scheme | str = Scheme.VANILLA,
                        seed: int = 0, max_iterations: int = 10_000,
                        n_data_bits: int | None = None, binary: bool = False,
                        background_class: int = 0) -> AssignmentResult:
    """Greedy placement followed by 2-swap local search.

    ``binary=True`` weights every edge 1 instead of by its boundary count.
    """
    if max_iterations <= 0:
        raise ValueError(f"iteration budget must be positive, got {max_iterations}")
    n = graph.n_classes
    nb = required_data_bits(n) if n_data_bits is None else n_data_bits
    rng = np.random.default_rng(seed)
    weights = graph.weight_matrix(binary)
    dist = _popcount_matrix(1 << nb)

    words = _greedy(weights, dist, rng)
    cb = Codebook(n, nb, Scheme(scheme), tuple(words), background_class)
    initial = assignment_cost(graph, cb, binary)
    iterations = _local_search(weights, dist, words, rng, max_iterations)
    cb = cb.with_assignment(words)
    return AssignmentResult(cb, assignment_cost(graph, cb, binary), initial, iterations, seed)
