import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import metrics_oracle
from textvote.metrics import compute_metrics, confusion, report_items, write_report


def test_hand_example():
    m = compute_metrics(confusion([0, 0, 1, 1], [0, 0, 0, 0], 2))
    assert m.accuracy == 0.5
    assert m.precision.tolist() == [0.5, 0.0]
    assert m.recall.tolist() == [1.0, 0.0]
    assert m.f1[0] == pytest.approx(2 / 3)
    assert m.macro_f1 == pytest.approx(1 / 3)


def test_perfect_predictions():
    m = compute_metrics(confusion([0, 1, 2], [0, 1, 2], 3))
    assert m.accuracy == 1.0 and m.macro_f1 == 1.0


def test_absent_class_counts_as_zero():
    m = compute_metrics(confusion([0, 0], [0, 0], 3))
    assert m.precision.tolist() == [1.0, 0.0, 0.0]
    assert m.macro_f1 == pytest.approx(1 / 3)


def test_harmonic_alternative():
    m = compute_metrics(confusion([0, 0, 1, 1], [0, 0, 0, 0], 2))
    assert m.macro_f1_harmonic == pytest.approx(2 * 0.25 * 0.5 / 0.75)


def test_confusion_rows_match_gold_frequencies():
    rng = np.random.default_rng(0)
    g, p = rng.integers(18, size=1000), rng.integers(18, size=1000)
    cm = confusion(g, p, 18)
    assert cm.counts.sum(axis=1).tolist() == np.bincount(g, minlength=18).tolist()
    assert cm.total == 1000


def test_confusion_errors():
    with pytest.raises(ValueError):
        confusion([0, 1], [0], 2)
    with pytest.raises(ValueError):
        confusion([0, 2], [0, 1], 2)


def test_matches_counting_oracle():
    rng = np.random.default_rng(1)
    for _ in range(200):
        K = int(rng.integers(2, 8))
        n = int(rng.integers(1, 60))
        g, p = rng.integers(K, size=n).tolist(), rng.integers(K, size=n).tolist()
        m = compute_metrics(confusion(g, p, K))
        o = metrics_oracle(g, p, K)
        assert abs(m.accuracy - o["accuracy"]) <= 1e-12
        for key in ("macro_p", "macro_r", "macro_f1"):
            assert abs(getattr(m, key) - o[key]) <= 1e-12
        assert np.abs(m.f1 - o["f1"]).max() <= 1e-12


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=40), st.permutations(range(4)))
def test_relabel_invariance(pairs, perm):
    g = [a for a, _ in pairs]
    p = [b for _, b in pairs]
    m1 = compute_metrics(confusion(g, p, 4))
    m2 = compute_metrics(confusion([perm[x] for x in g], [perm[x] for x in p], 4))
    assert m1.accuracy == m2.accuracy
    assert m1.macro_f1 == pytest.approx(m2.macro_f1, abs=1e-12)


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=40))
def test_values_in_unit_interval(pairs):
    m = compute_metrics(confusion([a for a, _ in pairs], [b for _, b in pairs], 5))
    for v in (m.accuracy, m.macro_p, m.macro_r, m.macro_f1, *m.f1, *m.precision, *m.recall):
        assert 0.0 <= v <= 1.0


def test_report_files(tmp_path):
    m = compute_metrics(confusion([0, 0, 1, 1], [0, 0, 0, 0], 2))
    items = report_items(m, ["pos", "neg"])
    write_report(items, tmp_path / "r.tsv", tmp_path / "r.json")
    lines = (tmp_path / "r.tsv").read_text().splitlines()
    assert lines[0] == "accuracy\t0.500000"
    assert "macro_f1\t0.333333" in lines
    assert json.loads((tmp_path / "r.json").read_text())["f1_pos"] == pytest.approx(2 / 3)
