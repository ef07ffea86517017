"""Peak-ratio harmonization (the QPTM weighting step) and epsilon calibration.

Two co-located peaks are *similar* when ``max(p_ref/p_test, p_test/p_ref)``
is at most ``tau = 1 + eps``. Similar peaks are both replaced by
``min(p_ref, p_test)``; dissimilar or unmatched peaks keep their value and
every non-peak pixel is dropped.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chromatogram import Chromatogram, DimensionMismatch, check_same_dims
from .peaks import PeakMap, extract_peaks, max_along_interval_columns
from .peaks import check_same_dims as check_same_peak_dims


def check_epsilon(eps: float) -> float:
    eps = float(eps)
    if not (eps > 0) or math.isnan(eps):
        raise ValueError(f"epsilon must be > 0, got {eps}")
    return eps


def peak_sim(p_ref: float, p_test: float) -> float:
    if not (p_ref > 0 and p_test > 0):
        raise ValueError(f"peak heights must be positive, got {p_ref}, {p_test}")
    return max(p_ref / p_test, p_test / p_ref)


@dataclass(frozen=True, eq=False)
class WeightMask:
    """Test-side multiplicative weights: 0 off-peak, ``p_common / p_test`` on harmonized peaks."""

    dims: tuple[int, int]
    weights: np.ndarray = field(repr=False)
    tau: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def _harmonized(ref: np.ndarray, test: np.ndarray, tau: float) -> np.ndarray:
    both = (ref > 0) & (test > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        sim = np.maximum(ref / test, test / ref)
    return both & (sim <= tau)


def build_weight_mask(ref: PeakMap, test: PeakMap, eps: float) -> WeightMask:
    check_same_peak_dims(ref, test)
    tau = 1.0 + check_epsilon(eps)
    r, t = ref.dense_view, test.dense_view
    harm = _harmonized(r, t, tau)
    weights = (t > 0).astype(np.float64)
    weights[harm] = np.minimum(r[harm], t[harm]) / t[harm]
    return WeightMask(test.dims, weights, tau)


def apply_weights(test: Chromatogram, mask: WeightMask) -> Chromatogram:
    if test.dims != mask.dims:
        raise DimensionMismatch(test.dims, mask.dims)
    return test.with_data(test.data * mask.weights)


def harmonize_pair(a: PeakMap, b: PeakMap, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Dense peak views of ``a`` and ``b`` with similar co-located peaks set to their minimum."""
    check_same_peak_dims(a, b)
    tau = 1.0 + check_epsilon(eps)
    da, db = a.dense_view, b.dense_view
    harm = _harmonized(da, db, tau)
    common = np.minimum(da[harm], db[harm])
    da[harm] = common
    db[harm] = common
    return da, db


def _column_deviation(da: np.ndarray, db: np.ndarray, w: int) -> float:
    ra = max_along_interval_columns(da, w)
    rb = max_along_interval_columns(db, w)
    return float(np.linalg.norm(ra - rb, axis=0).mean())


def pairwise_deviation(
    a: Chromatogram, b: Chromatogram, eps: float, w: int, min_height: float = 0.0
) -> float:
    """Mean per-column L2 distance between the max-along-interval views of two harmonized peak maps."""
    check_same_dims(a, b)
    da, db = harmonize_pair(extract_peaks(a, min_height), extract_peaks(b, min_height), eps)
    return _column_deviation(da, db, w)


@dataclass(frozen=True)
class CalibrationCurve:
    points: tuple[tuple[float, float], ...]
    chosen_epsilon: float

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def deviations(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def to_csv(self) -> str:
        lines = ["epsilon,deviation"]
        lines += [f"{e!r},{d!r}" for e, d in self.points]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {"chosen_epsilon": self.chosen_epsilon}


def choose_epsilon(epsilons: Sequence[float], deviations: Sequence[float], plateau_tol: float = 0.01) -> float:
    """Smallest epsilon whose deviation is within ``plateau_tol`` (relative) of the curve minimum."""
    dev = np.asarray(deviations, dtype=np.float64)
    lo = dev.min()
    # absolute slack so a floating-point zero minimum still admits round-off
    slack = plateau_tol * abs(lo) + 1e-12 * max(abs(dev.max()), 1.0)
    first = int(np.flatnonzero(dev <= lo + slack)[0])
    return float(epsilons[first])


def check_grid(eps_grid: Sequence[float]) -> list[float]:
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise ValueError("epsilon grid is empty")
    if any(not (e > 0) for e in grid):
        raise ValueError("epsilon grid values must be > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("epsilon grid must be strictly ascending")
    return grid


def calibrate_epsilon(
    family: Sequence[Chromatogram],
    eps_grid: Sequence[float],
    w: int,
    reference_index: int = 0,
    plateau_tol: float = 0.01,
    min_height: float = 0.0,
    threads: int = 1,
) -> CalibrationCurve:
    """Sweep epsilon and record the mean deviation of the training images from the reference.

    Every member of ``family`` other than ``family[reference_index]`` is a
    training image.
    """
    grid = check_grid(eps_grid)
    if len(family) < 2:
        raise ValueError("calibration needs a reference and at least one training image")
    ref = family[reference_index]
    for c in family:
        check_same_dims(ref, c)
    ref_peaks = extract_peaks(ref, min_height)
    train = [extract_peaks(c, min_height) for i, c in enumerate(family) if i != reference_index]

    def deviation(eps: float) -> float:
        devs = [_column_deviation(*harmonize_pair(ref_peaks, t, eps), w) for t in train]
        return float(np.mean(devs))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            devs = list(pool.map(deviation, grid))
    else:
        devs = [deviation(e) for e in grid]
    chosen = choose_epsilon(grid, devs, plateau_tol)
    return CalibrationCurve(tuple(zip(grid, devs)), chosen)
