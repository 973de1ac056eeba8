"""Dice similarity, case-then-cohort aggregation, and boundary/size analyses."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _check_dims(prediction, truth):
    prediction, truth = np.asarray(prediction), np.asarray(truth)
    if prediction.shape != truth.shape:
        raise ValueError(f"dims mismatch: prediction {prediction.shape}, truth {truth.shape}")
    return prediction, truth


def dsc_per_class(prediction, truth, class_index: int) -> float | None:
    """``2|P & G| / (|P| + |G|)``, or None when the class is absent from both."""
    prediction, truth = _check_dims(prediction, truth)
    p = prediction == class_index
    g = truth == class_index
    total = int(p.sum()) + int(g.sum())
    if total == 0:
        return None
    return 2.0 * int((p & g).sum()) / total


def dsc_case(prediction, truth, n_classes: int, include_background: bool = True,
             background_class: int = 0) -> dict[int, float | None]:
    """DSC for every class of one case (None for absent-in-both)."""
    prediction, truth = _check_dims(prediction, truth)
    # one pass over voxels via a joint histogram
    p = prediction.ravel().astype(np.int64)
    g = truth.ravel().astype(np.int64)
    inter = np.bincount(g[p == g], minlength=n_classes)
    sp = np.bincount(p, minlength=n_classes)
    sg = np.bincount(g, minlength=n_classes)
    out = {}
    for c in range(n_classes):
        if not include_background and c == background_class:
            continue
        total = int(sp[c] + sg[c])
        out[c] = None if total == 0 else 2.0 * int(inter[c]) / total
    return out


@dataclass
class DscReport:
    """Per-class DSC per case, per-case means and cohort mean/std.

    ``cohort_std`` is the sample standard deviation (divisor n-1) of the
    per-case means, reported as 0 for a single case.
    """

    per_case_per_class: list[dict[int, float | None]]
    per_case_mean: list[float | None]
    cohort_mean: float
    cohort_std: float
    n_cases: int
    classes_skipped: set[tuple[int, int]] = field(default_factory=set)
    cases_flagged: list[int] = field(default_factory=list)

    def class_mean(self, c: int) -> float | None:
        vals = [case[c] for case in self.per_case_per_class if case.get(c) is not None]
        return float(np.mean(vals)) if vals else None

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["case_id", "class_id", "dsc", "skipped"])
            for case_id, case in enumerate(self.per_case_per_class):
                for c, v in case.items():
                    w.writerow([case_id, c, "" if v is None else repr(v), int(v is None)])

    def write_summary_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["cohort_mean", "cohort_std", "n", "n_flagged"])
            w.writerow([repr(self.cohort_mean), repr(self.cohort_std), self.n_cases,
                        len(self.cases_flagged)])


def aggregate(per_case: list[dict[int, float | None]]) -> DscReport:
    """Average over present classes within each case, then over cases."""
    if not per_case:
        raise ValueError("need at least one case")
    means: list[float | None] = []
    skipped = set()
    flagged = []
    for case_id, case in enumerate(per_case):
        present = [v for v in case.values() if v is not None]
        skipped.update((case_id, c) for c, v in case.items() if v is None)
        if present:
            means.append(float(np.mean(present)))
        else:
            means.append(None)
            flagged.append(case_id)
    valid = np.array([m for m in means if m is not None])
    if valid.size == 0:
        raise ValueError("every case has all classes absent")
    std = float(np.std(valid, ddof=1)) if valid.size > 1 else 0.0
    return DscReport(list(per_case), means, float(valid.mean()), std, int(valid.size),
                     skipped, flagged)


def evaluate_cases(predictions, truths, n_classes: int, include_background: bool = True) -> DscReport:
    if len(predictions) != len(truths):
        raise ValueError("prediction and truth case counts differ")
    return aggregate([dsc_case(p, t, n_classes, include_background)
                      for p, t in zip(predictions, truths)])


def boundary_mask(truth) -> np.ndarray:
    """True where a voxel's face neighbourhood in ``truth`` holds another class."""
    truth = np.asarray(truth)
    mask = np.zeros(truth.shape, dtype=bool)
    for axis in range(truth.ndim):
        if truth.shape[axis] < 2:
            continue
        n = truth.shape[axis]
        lo = [slice(None)] * truth.ndim
        hi = [slice(None)] * truth.ndim
        lo[axis], hi[axis] = slice(0, n - 1), slice(1, n)
        diff = truth[tuple(lo)] != truth[tuple(hi)]
        mask[tuple(lo)] |= diff
        mask[tuple(hi)] |= diff
    return mask


def boundary_error_counts(prediction, truth) -> tuple[int, int]:
    """(misclassified voxels on a truth boundary, all misclassified voxels)."""
    prediction, truth = _check_dims(prediction, truth)
    wrong = prediction != truth
    return int((wrong & boundary_mask(truth)).sum()), int(wrong.sum())


def boundary_error_fraction(prediction, truth) -> float:
    """Share of misclassified voxels lying next to a ground-truth class boundary."""
    on_boundary, total = boundary_error_counts(prediction, truth)
    return on_boundary / total if total else 0.0


@dataclass(frozen=True)
class SizeRow:
    class_id: int
    mean_volume: float
    mean_dsc: float | None


def dsc_vs_structure_size(report: DscReport, truths) -> list[SizeRow]:
    """Per-class mean truth voxel count and mean DSC, smallest structures first.

    Classes absent from every truth volume are left out.
    """
    if len(truths) != len(report.per_case_per_class):
        raise ValueError("report and truth volumes cover different cases")
    classes = sorted({c for case in report.per_case_per_class for c in case})
    counts = np.zeros(len(classes))
    for t in truths:
        t = np.asarray(t)
        counts += np.array([(t == c).sum() for c in classes])
    counts /= len(truths)
    rows = [SizeRow(c, float(v), report.class_mean(c))
            for c, v in zip(classes, counts) if v > 0]
    return sorted(rows, key=lambda r: (r.mean_volume, r.class_id))


def write_size_table(rows: list[SizeRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["class_id", "mean_volume", "mean_dsc"])
        for r in rows:
            w.writerow([r.class_id, repr(r.mean_volume), "" if r.mean_dsc is None else repr(r.mean_dsc)])


def dsc_difference(rows_a: list[SizeRow], rows_b: list[SizeRow]) -> list[tuple[int, float, float, float, float]]:
    """(class, mean volume, dsc_a, dsc_b, dsc_a - dsc_b) for classes scored by both."""
    b = {r.class_id: r for r in rows_b}
    out = []
    for r in rows_a:
        other = b.get(r.class_id)
        if other is None or r.mean_dsc is None or other.mean_dsc is None:
            continue
        out.append((r.class_id, r.mean_volume, r.mean_dsc, other.mean_dsc, r.mean_dsc - other.mean_dsc))
    return out


def write_difference_table(rows, path, names=("a", "b")) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["class_id", "mean_volume", f"dsc_{names[0]}", f"dsc_{names[1]}", "dsc_difference"])
        for row in rows:
            w.writerow([row[0]] + [repr(v) for v in row[1:]])


def tercile_mean_differences(diff_rows) -> list[float]:
    """Mean DSC difference within the smallest, middle and largest volume terciles."""
    rows = sorted(diff_rows, key=lambda r: (r[1], r[0]))
    parts = np.array_split(np.array([r[4] for r in rows]), 3)
    return [float(p.mean()) if p.size else float("nan") for p in parts]
