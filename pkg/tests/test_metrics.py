from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semrel import metrics
from semrel.errors import DegenerateInput, LengthMismatch


def oracle_ranks(values) -> list[float]:
    """Explicit-sorting rank oracle: rank of x = average 1-based position of
    the occurrences of x in the sorted list."""
    ordered = sorted(values)
    ranks = []
    for x in values:
        positions = [i + 1 for i, v in enumerate(ordered) if v == x]
        ranks.append(sum(positions) / len(positions))
    return ranks


def oracle_pearson(a, b) -> float:
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def oracle_spearman(gold, pred) -> float:
    return oracle_pearson(oracle_ranks(gold), oracle_ranks(pred))


def tie_free_formula(gold, pred) -> float:
    n = len(gold)
    rg = oracle_ranks(gold)
    rp = oracle_ranks(pred)
    d2 = sum((a - b) ** 2 for a, b in zip(rg, rp))
    return 1 - 6 * d2 / (n * (n * n - 1))


# ---------------------------------------------------------------- spearman


def test_spearman_perfect_and_inverted():
    assert metrics.spearman([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0
    assert metrics.spearman([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0


def test_spearman_tie_free_example():
    assert metrics.spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_all_permutations_match_oracle():
    for n in range(2, 7):
        gold = list(range(n))
        for perm in itertools.permutations(range(n)):
            got = metrics.spearman(gold, list(perm))
            want = oracle_spearman(gold, list(perm))
            assert got == pytest.approx(want, abs=1e-12)
            assert got == pytest.approx(tie_free_formula(gold, list(perm)), abs=1e-12)


def test_spearman_ties_match_oracle():
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(3, 15))
        gold = rng.integers(0, 4, size=n).astype(float)
        pred = rng.integers(0, 4, size=n).astype(float)
        if np.all(gold == gold[0]) or np.all(pred == pred[0]):
            continue
        assert metrics.spearman(gold, pred) == pytest.approx(
            oracle_spearman(list(gold), list(pred)), abs=1e-12
        )


def test_spearman_errors():
    with pytest.raises(LengthMismatch):
        metrics.spearman([1, 2], [1, 2, 3])
    with pytest.raises(DegenerateInput):
        metrics.spearman([1.0], [2.0])
    with pytest.raises(DegenerateInput):
        metrics.spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateInput):
        metrics.spearman([1, 2, 3], [5, 5, 5])


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(min_value=-1000, max_value=1000), min_size=3, max_size=20, unique=True),
)
def test_spearman_invariant_under_monotone_transform(values):
    values = [float(v) for v in values]
    rng = np.random.default_rng(0)
    gold = list(rng.permutation(len(values)).astype(float))
    transformed = [math.exp(0.005 * v) + 3 * v for v in values]  # strictly increasing
    before = metrics.spearman(gold, values)
    after = metrics.spearman(gold, transformed)
    assert after == pytest.approx(before, abs=1e-12)


def test_rank_average_ties():
    assert metrics.rank_average([10, 20, 20, 30]).tolist() == [1.0, 2.5, 2.5, 4.0]


# ----------------------------------------------------------------- pearson


def test_pearson_affine_invariance():
    gold = [0.1, 0.4, 0.2, 0.9]
    pred = [2 * g + 1 for g in gold]
    assert metrics.pearson(gold, pred) == pytest.approx(1.0, abs=1e-12)
    assert metrics.pearson(gold, [-g for g in gold]) == pytest.approx(-1.0, abs=1e-12)


def test_pearson_hand_example():
    assert metrics.pearson([0, 1, 2], [0, 1, 1]) == pytest.approx(0.866025, abs=1e-6)


def test_pearson_matches_oracle_randomized():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 30))
        a = rng.normal(size=n)
        b = rng.normal(size=n)
        assert metrics.pearson(a, b) == pytest.approx(oracle_pearson(list(a), list(b)), abs=1e-12)


# -------------------------------------------------------------- binarized


def test_binarized_all_correct():
    out = metrics.binarized_metrics([0.9, 0.2], [0.8, 0.3], 0.5)
    assert out == (1.0, 1.0, 1.0)


def test_binarized_all_wrong_on_positives():
    out = metrics.binarized_metrics([0.9, 0.9], [0.1, 0.1], 0.5)
    assert out.recall == 0.0
    assert out.f1 == 0.0
    assert out.accuracy == 0.0


def test_binarized_confusion_matrix_case():
    out = metrics.binarized_metrics([1, 1, 0, 0], [1, 0, 0, 1], 0.5)
    assert out.f1 == pytest.approx(0.5)
    assert out.accuracy == pytest.approx(0.5)
    assert out.recall == pytest.approx(0.5)


def test_binarized_no_gold_positives():
    out = metrics.binarized_metrics([0.1, 0.2], [0.9, 0.8], 0.5)
    assert out.recall == 0.0
    assert out.accuracy == 0.0


def test_binarized_length_mismatch():
    with pytest.raises(LengthMismatch):
        metrics.binarized_metrics([1], [1, 2], 0.5)


# -------------------------------------------------------------- reporting


def _report(**overrides) -> metrics.EvalReport:
    base = dict(
        language="eng",
        track="A",
        model_name="tfidf+gbt",
        spearman=0.8123,
        pearson=0.8,
        f1=0.77,
        accuracy=0.81,
        recall=0.74,
        n=250,
        threshold=0.5,
    )
    base.update(overrides)
    return metrics.EvalReport(**base)


def test_render_table_shape():
    text = metrics.render_report([_report()], "table").decode()
    lines = text.strip().split("\n")
    assert len(lines) == 2
    assert lines[0].split()[:3] == ["Sr.No.", "Language", "Model"]
    assert "0.812" in lines[1]


def test_render_table_empty():
    text = metrics.render_report([], "table").decode()
    assert text.strip().split("\n") == ["Sr.No.  Language  Model  F1  Accuracy  Recall  Spearman"]


def test_json_round_trip():
    reports = [_report(), _report(language="mar", track="C")]
    blob = metrics.render_report(reports, "json")
    assert metrics.reports_from_json(blob) == reports


def test_evaluate_scores_builds_full_report():
    gold = [0.9, 0.1, 0.6, 0.3]
    pred = [0.8, 0.05, 0.7, 0.2]
    report = metrics.evaluate_scores(gold, pred, language="eng", track="B", model_name="m")
    assert report.n == 4
    assert report.spearman == pytest.approx(1.0)
    assert report.threshold == 0.5
