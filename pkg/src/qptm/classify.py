"""Scoring against references, percent-match normalization, thresholding and metrics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .baselines import PcaModel, corr2, fit_pca, l2_dist, pca_similarity
from .chromatogram import Chromatogram, SourceLibrary, check_same_dims
from .config import MethodId, RunConfig
from .peaks import extract_peaks
from .quantize import make_alphabet, paa_columns, sax_columns, sax_dist_columns, znormalize_image
from .similarity import calibrate_epsilon, harmonize_pair

DEFAULT_EPS_GRID = tuple(round(0.1 * k, 10) for k in range(1, 11))


@lru_cache(maxsize=32)
def _alphabet(size: int):
    return make_alphabet(size)


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def pca_for_batch(coll: Sequence[Chromatogram]) -> PcaModel:
    # repeating samples leaves the principal directions unchanged
    coll = list(coll)
    while len(coll) < 3:
        coll = coll + coll
    return fit_pca(coll)


def _sax_image_distance(a: np.ndarray, b: np.ndarray, cfg: RunConfig) -> float:
    m = a.shape[0]
    w = cfg.word_length(m)
    abc = _alphabet(cfg.alphabet_size)
    per_column = cfg.znormalize and cfg.znorm_scope == "column"
    if cfg.znormalize and cfg.znorm_scope == "image":
        a, b = znormalize_image(a), znormalize_image(b)
    sa = sax_columns(a, w, abc, per_column)
    sb = sax_columns(b, w, abc, per_column)
    return float(sax_dist_columns(sa, sb, abc, m, cfg.sax_table_semantics).mean())


def _paa_image_distance(a: np.ndarray, b: np.ndarray, cfg: RunConfig) -> float:
    m = a.shape[0]
    w = cfg.word_length(m)
    d = np.linalg.norm(paa_columns(a, w) - paa_columns(b, w), axis=0)
    if cfg.paa_dist_scaled:
        d = d * np.sqrt(m / w)
    return float(d.mean())


def harmonized_views(test: Chromatogram, ref: Chromatogram, eps: float,
                     min_height: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """(test, ref) dense peak views after harmonizing co-located similar peaks."""
    check_same_dims(test, ref)
    href, htest = harmonize_pair(extract_peaks(ref, min_height), extract_peaks(test, min_height), eps)
    return htest, href


def score(test: Chromatogram, ref: Chromatogram, method: MethodId | str,
          config: RunConfig | None = None, *, epsilon: float | None = None,
          pca_model: PcaModel | None = None) -> float:
    """Raw comparison value of ``test`` against ``ref``: a distance, or a correlation for corr2/pca.

    qptm harmonizes both peak maps and compares per-column SAX words (mean
    over columns); paa does the same with PAA vectors; sax compares SAX
    words of the raw columns. Standardization before SAX covers the whole
    image by default (``znorm_scope="image"``); per-column standardization
    blows a lone small peak in an otherwise empty column up to full scale.
    """
    cfg = config or RunConfig()
    method = MethodId.parse(method)
    check_same_dims(test, ref)
    eps = cfg.epsilon if epsilon is None else epsilon
    if method is MethodId.QPTM:
        ht, hr = harmonized_views(test, ref, eps, cfg.min_peak_height)
        return _sax_image_distance(ht, hr, cfg)
    if method is MethodId.PAA:
        ht, hr = harmonized_views(test, ref, eps, cfg.min_peak_height)
        return _paa_image_distance(ht, hr, cfg)
    if method is MethodId.SAX:
        return _sax_image_distance(test.data, ref.data, cfg)
    if method is MethodId.L2:
        return l2_dist(test, ref)
    if method is MethodId.CORR2:
        return corr2(test, ref)
    if pca_model is None:
        raise ValueError("method 'pca' needs a fitted PcaModel")
    return pca_similarity(pca_model, test, ref)


@dataclass(frozen=True)
class ScoreRow:
    test_id: str
    ref_id: str
    method: MethodId
    raw: float
    percent_match: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d


def normalize_scores(rows: Sequence[ScoreRow]) -> list[ScoreRow]:
    """Map raw values of one method's batch to percent match.

    Distances: ``100 * (1 - raw / max_raw)`` (an all-zero batch is 100 %).
    Correlations: ``100 * max(raw, 0)``.
    """
    if not rows:
        raise ValueError("empty batch")
    methods = {r.method for r in rows}
    if len(methods) != 1:
        raise ValueError("a batch must hold a single method")
    method = MethodId.parse(rows[0].method)
    if method.is_distance:
        top = max(r.raw for r in rows)
        pct = [100.0 if top == 0 else 100.0 * (1.0 - r.raw / top) for r in rows]
    else:
        pct = [100.0 * max(r.raw, 0.0) for r in rows]
    return [ScoreRow(r.test_id, r.ref_id, method, r.raw, p) for r, p in zip(rows, pct)]


def score_batch(tests: Sequence[Chromatogram], ref: Chromatogram, config: RunConfig | None = None,
                *, epsilon: float | None = None, pca_model: PcaModel | None = None) -> list[ScoreRow]:
    """Score every test image against one reference and normalize within the batch."""
    cfg = config or RunConfig()
    if cfg.method is MethodId.PCA and pca_model is None:
        pca_model = pca_for_batch([ref, *tests])
    raws = _pmap(lambda t: score(t, ref, cfg.method, cfg, epsilon=epsilon, pca_model=pca_model),
                 list(tests), cfg.threads)
    rows = [ScoreRow(t.sample_id, ref.sample_id, cfg.method, r) for t, r in zip(tests, raws)]
    return normalize_scores(rows)


def decide(test: Chromatogram, library: SourceLibrary, config: RunConfig | None = None,
           *, pca_model: PcaModel | None = None) -> tuple[int, str]:
    """Index and region of the closest library entry (lowest distance / highest correlation).

    Ties go to the lowest index.
    """
    cfg = config or RunConfig()
    if cfg.method is MethodId.PCA and pca_model is None:
        pca_model = pca_for_batch([*library.entries, test])
    raws = _pmap(lambda ref: score(test, ref, cfg.method, cfg, pca_model=pca_model),
                 list(library.entries), cfg.threads)
    keyed = raws if cfg.method.is_distance else [-r for r in raws]
    best = min(range(len(keyed)), key=lambda k: (keyed[k], k))
    return best, library.regions[best]


@dataclass(frozen=True)
class ConfusionMatrix2:
    """Binary confusion counts; rows are true (target, other), columns predicted (target, other)."""

    tp: int
    fn: int
    fp: int
    tn: int

    @classmethod
    def from_matrix(cls, m) -> "ConfusionMatrix2":
        (tp, fn), (fp, tn) = m
        return cls(int(tp), int(fn), int(fp), int(tn))

    def as_matrix(self) -> list[list[int]]:
        return [[self.tp, self.fn], [self.fp, self.tn]]

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


def binary_classify(rows: Sequence[ScoreRow], targets: Sequence[bool], theta: float = 96.0) -> ConfusionMatrix2:
    """Predict *target* when percent match >= theta and tally against ground truth."""
    if len(rows) != len(targets):
        raise ValueError("one ground-truth flag per row is required")
    tp = fn = fp = tn = 0
    for r, truth in zip(rows, targets):
        if r.percent_match is None:
            raise ValueError(f"row {r.test_id!r} has not been normalized")
        pred = r.percent_match >= theta
        if truth:
            tp += pred
            fn += not pred
        else:
            fp += pred
            tn += not pred
    return ConfusionMatrix2(tp, fn, fp, tn)


@dataclass(frozen=True)
class MetricSet:
    """Classification metrics; ``None`` marks a 0/0 ratio."""

    accuracy: float
    precision: float | None
    sensitivity: float | None
    specificity: float | None
    f1: float

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics(c: ConfusionMatrix2) -> MetricSet:
    if c.total <= 0:
        raise ValueError("confusion matrix is empty")
    precision = _ratio(c.tp, c.tp + c.fp)
    sensitivity = _ratio(c.tp, c.tp + c.fn)
    specificity = _ratio(c.tn, c.tn + c.fp)
    if not precision or not sensitivity:
        f1 = 0.0
    else:
        f1 = 2 * precision * sensitivity / (precision + sensitivity)
    return MetricSet((c.tp + c.tn) / c.total, precision, sensitivity, specificity, f1)


def run_binary(tests: Sequence[Chromatogram], reference: Chromatogram, config: RunConfig | None = None,
               targets: Sequence[bool] | None = None) -> dict:
    """Target-vs-rest run for one method; targets default to ``test.region == reference.region``."""
    cfg = config or RunConfig()
    if targets is None:
        targets = [t.region == reference.region for t in tests]
    rows = score_batch(tests, reference, cfg)
    cm = binary_classify(rows, targets, cfg.theta)
    return {
        "method": cfg.method.value,
        "confusion": cm.as_matrix(),
        "metrics": metrics(cm).to_dict(),
        "rows": [dict(r.to_dict(), target=bool(f)) for r, f in zip(rows, targets)],
    }


def row_epsilon(library: SourceLibrary, i: int, config: RunConfig, training_count: int = 6,
                eps_grid: Sequence[float] = DEFAULT_EPS_GRID, plateau_tol: float = 0.01) -> float:
    """Epsilon for cross-matrix row ``i``: calibrated on entry i plus the next family members.

    Entry ``i`` is the reference and the first ``training_count`` other
    entries with the same region are the training set. Families too small
    for that fall back to ``config.epsilon``.
    """
    region = library.regions[i]
    others = [k for k, r in enumerate(library.regions) if r == region and k != i]
    if training_count < 1 or len(others) < training_count:
        return config.epsilon
    family = [library[i]] + [library[k] for k in others[:training_count]]
    w = config.word_length(library[i].m)
    curve = calibrate_epsilon(family, eps_grid, w, 0, plateau_tol, config.min_peak_height)
    return curve.chosen_epsilon


def cross_score_matrix(library: SourceLibrary, config: RunConfig | None = None, training_count: int = 6,
                       eps_grid: Sequence[float] = DEFAULT_EPS_GRID) -> tuple[np.ndarray, list[float]]:
    """K x K percent matrix; entry (i, j) is entry j scored against reference entry i.

    Each row is normalized as its own batch. For qptm each row gets its own
    calibrated epsilon (see ``row_epsilon``); returns ``(matrix, row_epsilons)``.
    """
    cfg = config or RunConfig()
    entries = list(library.entries)
    pca_model = pca_for_batch(entries) if cfg.method is MethodId.PCA else None

    def row(i: int) -> tuple[list[float], float]:
        eps = (row_epsilon(library, i, cfg, training_count, eps_grid)
               if cfg.method is MethodId.QPTM else cfg.epsilon)
        raws = [score(t, entries[i], cfg.method, cfg, epsilon=eps, pca_model=pca_model) for t in entries]
        rows = normalize_scores([ScoreRow(t.sample_id, entries[i].sample_id, cfg.method, r)
                                 for t, r in zip(entries, raws)])
        return [r.percent_match for r in rows], eps

    results = _pmap(row, list(range(len(entries))), cfg.threads)
    return np.array([r[0] for r in results]), [r[1] for r in results]


def block_means(matrix: np.ndarray, regions: Sequence[str]) -> tuple[float, float]:
    """Mean off-diagonal percent within families and across families."""
    regions = np.asarray(regions)
    same = regions[:, None] == regions[None, :]
    off = ~np.eye(len(regions), dtype=bool)
    within = matrix[same & off]
    across = matrix[~same]
    return (float(within.mean()) if within.size else math.nan,
            float(across.mean()) if across.size else math.nan)
