import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compactseg.metrics import (
    aggregate,
    boundary_error_fraction,
    dsc_case,
    dsc_per_class,
    dsc_vs_structure_size,
    evaluate_cases,
    tercile_mean_differences,
    write_size_table,
)


def test_dsc_identity_and_disjoint():
    t = np.array([[0, 1], [1, 2]])
    assert dsc_per_class(t, t, 1) == 1.0
    p = np.array([[1, 0], [0, 2]])
    assert dsc_per_class(p, t, 1) == 0.0
    assert dsc_per_class(t, t, 5) is None


def test_dsc_hand_counted():
    truth = np.zeros(40, dtype=int)
    pred = np.zeros(40, dtype=int)
    truth[:20] = 1          # |G| = 20
    pred[15:25] = 1         # |P| = 10, overlap 5
    assert dsc_per_class(pred, truth, 1) == pytest.approx(1 / 3)


def test_dsc_dims_mismatch():
    with pytest.raises(ValueError):
        dsc_per_class(np.zeros((2, 2)), np.zeros((2, 3)), 0)


def test_dsc_case_matches_per_class():
    rng = np.random.default_rng(0)
    p = rng.integers(0, 6, (5, 5, 3))
    t = rng.integers(0, 6, (5, 5, 3))
    case = dsc_case(p, t, 8)
    for c in range(8):
        assert case[c] == dsc_per_class(p, t, c)
    assert 0 not in dsc_case(p, t, 8, include_background=False)


def test_aggregate_single_case():
    r = aggregate([{0: 1.0, 1: 1.0}])
    assert r.cohort_mean == 1.0 and r.cohort_std == 0.0 and r.n_cases == 1


def test_aggregate_two_cases():
    r = aggregate([{0: 0.8}, {0: 0.9}])
    assert r.cohort_mean == pytest.approx(0.85)
    assert r.cohort_std == pytest.approx(0.0707, abs=1e-4)


def test_aggregate_excludes_absent():
    r = aggregate([{0: 0.5, 1: None}])
    assert r.per_case_mean == [0.5]
    assert r.classes_skipped == {(0, 1)}


def test_aggregate_flags_empty_case():
    r = aggregate([{0: None}, {0: 0.4}])
    assert r.cases_flagged == [0]
    assert r.cohort_mean == 0.4
    with pytest.raises(ValueError):
        aggregate([])


def test_identical_cases_zero_std():
    case = {0: 0.3, 1: 0.9, 2: None}
    assert aggregate([case] * 5).cohort_std == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_dsc_symmetry_and_permutation(seed):
    rng = np.random.default_rng(seed)
    p = rng.integers(0, 4, 60)
    t = rng.integers(0, 4, 60)
    perm = rng.permutation(60)
    for c in range(4):
        assert dsc_per_class(p, t, c) == dsc_per_class(t, p, c)
        assert dsc_per_class(p[perm], t[perm], c) == dsc_per_class(p, t, c)


def _two_halves():
    truth = np.zeros((8, 8, 1), dtype=int)
    truth[4:] = 1
    return truth


def test_boundary_perfect():
    t = _two_halves()
    assert boundary_error_fraction(t, t) == 0.0


def test_boundary_interior_errors():
    t = _two_halves()
    p = t.copy()
    p[1, 1, 0] = 2
    p[6, 5, 0] = 0
    assert boundary_error_fraction(p, t) == 0.0


def test_boundary_interface_errors():
    t = _two_halves()
    p = t.copy()
    p[3, :, 0] = 1  # rows 3 and 4 form the interface
    p[4, 2, 0] = 0
    assert boundary_error_fraction(p, t) == 1.0


def test_boundary_mixed_and_relabel_invariant():
    t = _two_halves()
    p = t.copy()
    p[3, 0, 0] = 1
    p[0, 0, 0] = 1
    assert boundary_error_fraction(p, t) == 0.5
    relabel = np.array([7, 3, 9])
    assert boundary_error_fraction(relabel[p], relabel[t]) == 0.5


def test_size_table():
    t = np.zeros((4, 4, 1), dtype=int)
    rep = evaluate_cases([t], [t], 3)
    rows = dsc_vs_structure_size(rep, [t])
    assert [(r.class_id, r.mean_volume, r.mean_dsc) for r in rows] == [(0, 16.0, 1.0)]


def test_size_table_sorted_and_csv(tmp_path):
    t1 = np.array([0, 0, 0, 1, 2, 2])
    t2 = np.array([0, 0, 2, 2, 2, 2])
    rep = evaluate_cases([t1, t2], [t1, t2], 4)
    rows = dsc_vs_structure_size(rep, [t1, t2])
    assert [r.class_id for r in rows] == [1, 0, 2]
    assert rows[0].mean_volume == 0.5
    write_size_table(rows, tmp_path / "s.csv")
    with open(tmp_path / "s.csv") as f:
        lines = list(csv.reader(f))
    assert lines[0] == ["class_id", "mean_volume", "mean_dsc"]
    assert len(lines) == 4


def test_report_csv(tmp_path):
    rep = aggregate([{0: 0.5, 1: None}, {0: 1.0, 1: 0.0}])
    rep.write_csv(tmp_path / "r.csv")
    rep.write_summary_csv(tmp_path / "s.csv")
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    assert rows[0] == ["case_id", "class_id", "dsc", "skipped"]
    assert rows[2] == ["0", "1", "", "1"]
    summary = list(csv.reader(open(tmp_path / "s.csv")))
    assert summary[1][2] == "2"


def test_tercile_differences():
    rows = [(c, float(c), 0.0, 0.0, 1.0 if c < 3 else 0.0) for c in range(9)]
    assert tercile_mean_differences(rows) == [1.0, 0.0, 0.0]
