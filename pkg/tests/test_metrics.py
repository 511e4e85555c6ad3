from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_panel
from oracles import ap_prefixes, ap_prefixes_exact, auroc_pairs, random_instance
from fuselab.errors import InvalidThreshold, LengthMismatch, NonFiniteScore, SingleClassDataset
from fuselab.metrics import (
    accuracy,
    auprc,
    auroc,
    curve_points,
    evaluate,
    evaluate_panel,
    format_curve_csv,
)


def test_auroc_perfect():
    assert auroc([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1]) == 1.0


def test_auroc_all_ties():
    assert auroc([1, 0, 1, 0, 0], [0.3] * 5) == 0.5


def test_auroc_pair_count_example():
    # oracle: auroc_pairs gives 3/4
    assert auroc([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.2]) == 0.75
    assert auroc_pairs([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.2]) == 0.75


def test_auprc_examples():
    assert auprc([1, 0], [0.9, 0.1]) == 1.0
    # oracle: ap_prefixes_exact gives 5/6
    assert ap_prefixes_exact([1, 0, 1], [0.9, 0.8, 0.7]) == Fraction(5, 6)
    assert auprc([1, 0, 1], [0.9, 0.8, 0.7]) == pytest.approx(5 / 6, abs=1e-15)


@pytest.mark.parametrize("labels", [[1, 0, 0, 0], [1, 1, 0, 0, 0], [1, 1, 1, 0]])
def test_auprc_all_ties_is_prevalence(labels):
    assert auprc(labels, [0.4] * len(labels)) == pytest.approx(sum(labels) / len(labels), abs=1e-15)


def test_accuracy_examples():
    assert accuracy([1, 0], [0.9, 0.1], 0.5) == 1.0
    assert accuracy([1, 0], [0.1, 0.9], 0.5) == 0.0
    assert accuracy([1, 1, 0, 0], [0.6, 0.4, 0.6, 0.4], 0.5) == 0.5
    assert accuracy([1, 0], [0.5, 0.49], 0.5) == 1.0


def test_accuracy_threshold_bounds():
    with pytest.raises(InvalidThreshold):
        accuracy([1, 0], [0.9, 0.1], 1.0)


def test_errors():
    with pytest.raises(SingleClassDataset):
        auroc([1, 1], [0.1, 0.2])
    with pytest.raises(LengthMismatch):
        auprc([1, 0, 1], [0.1, 0.2])
    with pytest.raises(NonFiniteScore):
        auroc([1, 0], [np.nan, 0.2])
    with pytest.raises(LengthMismatch):
        accuracy([1, 0], [0.1], 0.5)


def test_roc_points_examples():
    assert curve_points([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1], "roc").points == ((0, 0), (0, 1), (1, 1))
    assert curve_points([1, 0, 0], [0.5] * 3, "roc").points == ((0, 0), (1, 1))
    c = curve_points([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.2], "roc")
    assert c.area() == pytest.approx(0.75, abs=1e-12)


def test_pr_points():
    c = curve_points([1, 0, 1], [0.9, 0.8, 0.7], "pr")
    assert c.points == ((0.0, 1.0), (0.5, 1.0), (0.5, 0.5), (1.0, 2 / 3))
    assert c.area() == pytest.approx(5 / 6, abs=1e-12)


def test_curve_csv_header():
    c = curve_points([1, 0], [0.9, 0.1], "roc")
    text = format_curve_csv(c, "core", "uadfv")
    assert text.splitlines()[:2] == ["# kind=roc model=core dataset=uadfv", "x,y"]


def test_evaluate_panel_shape_and_perfect_row():
    labels = [1, 0, 1, 0, 0]
    p = make_panel([labels, [0.2, 0.3, 0.9, 0.1, 0.5], [0.2, 0.3, 0.9, 0.1, 0.5]], labels)
    t = evaluate_panel(p)
    assert len(t.entries) == 3
    assert t.get("m0", "d").auroc == t.get("m0", "d").auprc == 1.0
    assert t.get("m1", "d") == t.get("m2", "d")
    assert (t.get("m1", "d").n_pos, t.get("m1", "d").n_neg) == (2, 3)


# property tests -----------------------------------------------------------

grid = st.integers(0, 64).map(lambda k: k / 64)


@st.composite
def instances(draw, max_n=40):
    n = draw(st.integers(2, max_n))
    labels = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    labels[0], labels[1] = 1, 0
    scores = draw(st.lists(grid, min_size=n, max_size=n))
    return np.array(labels), np.array(scores)


@given(instances())
def test_matches_oracles(inst):
    y, s = inst
    assert auroc(y, s) == pytest.approx(auroc_pairs(y, s), abs=1e-12)
    assert auprc(y, s) == pytest.approx(ap_prefixes(y, s), abs=1e-12)


@given(instances())
def test_rank_invariance(inst):
    # grid values keep 2x+3 and x**3 exact, hence strictly increasing in floats
    y, s = inst
    for f in (lambda x: 2 * x + 3, lambda x: x**3):
        assert auroc(y, f(s)) == auroc(y, s)
        assert auprc(y, f(s)) == auprc(y, s)


@given(instances())
def test_complement_symmetry(inst):
    y, s = inst
    assert auroc(y, s) + auroc(y, -s) == pytest.approx(1.0, abs=1e-12)


@given(instances(), st.randoms(use_true_random=False))
def test_permutation_invariance(inst, rnd):
    y, s = inst
    idx = list(range(len(y)))
    rnd.shuffle(idx)
    assert auroc(y[idx], s[idx]) == pytest.approx(auroc(y, s), abs=1e-12)
    assert auprc(y[idx], s[idx]) == pytest.approx(auprc(y, s), abs=1e-12)


@given(instances())
def test_curve_consistency(inst):
    y, s = inst
    roc = curve_points(y, s, "roc")
    pr = curve_points(y, s, "pr")
    assert roc.points[0] == (0.0, 0.0) and roc.points[-1] == (1.0, 1.0)
    assert np.all(np.diff(roc.x) >= 0) and np.all(np.diff(pr.x) >= 0)
    assert roc.area() == pytest.approx(auroc(y, s), abs=1e-12)
    assert pr.area() == pytest.approx(auprc(y, s), abs=1e-12)


def test_random_instances_against_oracles():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        y, s = random_instance(rng, max_n=60)
        r = evaluate(y, s)
        assert abs(r.auroc - auroc_pairs(y, s)) <= 1e-12
        assert abs(r.auprc - ap_prefixes(y, s)) <= 1e-12
