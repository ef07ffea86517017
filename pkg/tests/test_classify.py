import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chrom
from qptm.chromatogram import SourceLibrary
from qptm.classify import (
    ConfusionMatrix2,
    ScoreRow,
    binary_classify,
    block_means,
    cross_score_matrix,
    decide,
    metrics,
    normalize_scores,
    run_binary,
    score,
    score_batch,
)
from qptm.config import MethodId, RunConfig
from qptm.synth import FamilySpec, PeakSpec, render
from reference_values import CONFUSION, METRICS_4DP

ALL = list(MethodId)


@pytest.mark.parametrize("method", ALL)
def test_self_comparison(method, small_bench):
    x = small_bench.samples[0]
    batch = score_batch([x, *small_bench.samples[1:4]], x, RunConfig(method=method))
    assert batch[0].percent_match == pytest.approx(100.0)
    if method.is_distance:
        assert batch[0].raw == 0.0


def test_corr2_self_is_one(small_bench):
    x = small_bench.samples[0]
    assert score(x, x, "corr2") == pytest.approx(1.0)


def test_normalize_scores_linear_map():
    rows = [ScoreRow("t", "r", MethodId.L2, v) for v in (0.0, 5.0, 10.0)]
    assert [r.percent_match for r in normalize_scores(rows)] == [100.0, 50.0, 0.0]
    one = normalize_scores([ScoreRow("t", "r", MethodId.SAX, 0.0)])
    assert one[0].percent_match == 100.0
    c = normalize_scores([ScoreRow("t", "r", MethodId.CORR2, 0.923692),
                          ScoreRow("u", "r", MethodId.CORR2, -0.2)])
    assert c[0].percent_match == pytest.approx(92.3692) and c[1].percent_match == 0.0
    with pytest.raises(ValueError):
        normalize_scores([])
    with pytest.raises(ValueError):
        normalize_scores([ScoreRow("t", "r", MethodId.L2, 1.0), ScoreRow("t", "r", MethodId.SAX, 1.0)])


def test_binary_classify_hand_tally():
    pct = [99.0, 96.0, 95.9, 97.0, 10.0]
    truth = [True, True, True, False, False]
    rows = [ScoreRow(str(k), "r", MethodId.QPTM, 0.0, p) for k, p in enumerate(pct)]
    assert binary_classify(rows, truth, 96.0) == ConfusionMatrix2(2, 1, 1, 1)
    allt = [ScoreRow(str(k), "r", MethodId.QPTM, 0.0, 100.0) for k in range(3)]
    assert binary_classify(allt, [True] * 3).as_matrix() == [[3, 0], [0, 0]]


@pytest.mark.parametrize("name", [k for k in CONFUSION if k != "PCA"])
def test_metrics_reproduce_published_rows(name):
    got = metrics(ConfusionMatrix2.from_matrix(CONFUSION[name]))
    exp = METRICS_4DP[name]
    for g, e in zip((got.accuracy, got.precision, got.sensitivity, got.specificity, got.f1), exp):
        assert (g is None) if e is None else g == pytest.approx(e, abs=1e-4)


def test_pca_rows_are_inconsistent():
    from_table = metrics(ConfusionMatrix2.from_matrix(CONFUSION["PCA"]))
    assert from_table.accuracy == pytest.approx(0.8519, abs=1e-4)
    assert from_table.precision == pytest.approx(0.6364, abs=1e-4)
    printed = metrics(ConfusionMatrix2(0, 7, 0, 20))
    assert printed.precision is None and printed.f1 == 0.0
    assert from_table != printed


@settings(max_examples=300)
@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_metrics_formulas_and_class_swap(tp, fn, fp, tn):
    if tp + fn + fp + tn == 0:
        with pytest.raises(ValueError):
            metrics(ConfusionMatrix2(tp, fn, fp, tn))
        return
    m = metrics(ConfusionMatrix2(tp, fn, fp, tn))
    swapped = metrics(ConfusionMatrix2(tn, fp, fn, tp))
    assert m.accuracy == swapped.accuracy
    assert m.sensitivity == swapped.specificity and m.specificity == swapped.sensitivity
    assert swapped.precision == (tn / (tn + fn) if tn + fn else None)
    for v in (m.accuracy, m.precision, m.sensitivity, m.specificity, m.f1):
        assert v is None or 0.0 <= v <= 1.0


def test_decide(small_bench):
    lib = small_bench.library
    assert decide(lib[1], lib) == (1, lib.regions[1])
    single = SourceLibrary.from_entries([lib[2]])
    assert decide(lib[0], single)[0] == 0
    for t in small_bench.tests:
        assert decide(t, lib)[1] == t.region


def test_decide_ties_go_to_lowest_index():
    a = chrom(np.eye(3), "a", "X")
    lib = SourceLibrary.from_entries([chrom(np.eye(3), "b", "Y"), chrom(np.eye(3), "c", "Z")])
    assert decide(a, lib, RunConfig(method="l2")) == (0, "Y")


def test_sibling_closer_than_cross_region(small_bench):
    s = small_bench.samples
    f1 = [c for c in s if c.region == "F1"]
    f2 = [c for c in s if c.region == "F2"]
    assert score(f1[1], f1[0], "qptm") < score(f2[0], f1[0], "qptm")


def test_qptm_invariant_to_common_peak_scaling():
    p = [PeakSpec((8.0, 4.0), 100.0, 1.5, 1.0), PeakSpec((24.0, 12.0), 60.0, 1.5, 1.0)]
    imgs, _ = render(FamilySpec("F", tuple(p), height_jitter=0.2, seed=1), (32, 18), 2)
    a, b = imgs
    cfg = RunConfig(znormalize=False)
    base = score(a, b, "qptm", cfg)
    scaled = score(a.with_data(a.data * 3), b.with_data(b.data * 3), "qptm", cfg)
    assert scaled == base


def test_run_binary_report_shape(small_bench):
    ref = small_bench.library[0]
    out = run_binary(small_bench.tests, ref, RunConfig(threads=2))
    assert out["method"] == "qptm"
    assert sum(map(sum, out["confusion"])) == len(small_bench.tests)
    assert [r["target"] for r in out["rows"]] == [t.region == ref.region for t in small_bench.tests]


def test_run_binary_copies_of_reference():
    x = chrom(np.random.default_rng(0).random((16, 4)), "x", "T")
    out = run_binary([x, x, x], x, RunConfig(method="l2"))
    assert out["confusion"] == [[3, 0], [0, 0]] and out["metrics"]["sensitivity"] == 1.0


def test_cross_matrix_identical_and_single():
    x = chrom(np.random.default_rng(0).random((16, 4)), "x", "T")
    m, eps = cross_score_matrix(SourceLibrary.from_entries([x]))
    assert m.tolist() == [[100.0]] and eps == [0.5]
    m2, _ = cross_score_matrix(SourceLibrary.from_entries([x, x]))
    assert np.all(m2 == 100.0)


def test_cross_matrix_blocks(small_bench):
    lib = SourceLibrary.from_entries(small_bench.samples)
    m, eps = cross_score_matrix(lib, training_count=3)
    assert m.shape == (len(lib), len(lib))
    assert np.allclose(np.diag(m), 100.0)
    within, across = block_means(m, lib.regions)
    assert within > across
    assert all(0.1 <= e <= 1.0 for e in eps)


def test_block_means_by_hand():
    m = np.array([[100, 80, 10], [70, 100, 20], [5, 15, 100.0]])
    assert block_means(m, ["a", "a", "b"]) == (75.0, 12.5)
    w, a = block_means(np.array([[100.0]]), ["a"])
    assert math.isnan(w) and math.isnan(a)
