"""Peak topography maps: column-wise local maxima and max-along-interval reduction."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .chromatogram import Chromatogram, DimensionMismatch


class Peak(NamedTuple):
    row: int
    col: int
    height: float


@dataclass(frozen=True, eq=False)
class PeakMap:
    """Sparse set of column-wise maxima of one chromatogram, sorted by (col, row)."""

    source_id: str
    dims: tuple[int, int]
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    heights: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        heights = np.asarray(self.heights, dtype=np.float64)
        if not (rows.shape == cols.shape == heights.shape) or rows.ndim != 1:
            raise ValueError("rows, cols and heights must be 1-D and equally long")
        m, n = self.dims
        if rows.size and (rows.min() < 0 or rows.max() >= m or cols.min() < 0 or cols.max() >= n):
            raise ValueError("peak location outside dims")
        if np.any(heights <= 0):
            raise ValueError("peak heights must be positive")
        order = np.lexsort((rows, cols))
        rows, cols, heights = rows[order], cols[order], heights[order]
        flat = cols * m + rows
        if np.any(np.diff(flat) == 0):
            raise ValueError("duplicate peak location")
        for a in (rows, cols, heights):
            a.setflags(write=False)
        object.__setattr__(self, "dims", (int(m), int(n)))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "heights", heights)

    @property
    def peaks(self) -> list[Peak]:
        return [Peak(int(r), int(c), float(h)) for r, c, h in zip(self.rows, self.cols, self.heights)]

    def __len__(self) -> int:
        return int(self.rows.size)

    @property
    def dense_view(self) -> np.ndarray:
        out = np.zeros(self.dims)
        out[self.rows, self.cols] = self.heights
        return out

    @property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.dims, dtype=bool)
        out[self.rows, self.cols] = True
        return out

    def __eq__(self, other):
        if not isinstance(other, PeakMap):
            return NotImplemented
        return (
            self.source_id == other.source_id
            and self.dims == other.dims
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.heights, other.heights)
        )

    __hash__ = None


def column_peak_mask(data: np.ndarray, min_height: float = 0.0) -> np.ndarray:
    """Boolean mask of column-wise local maxima of a 2-D array.

    A flat run counts once, at its leftmost (lowest row) index, and only if
    the values on both sides of the run are lower. Column endpoints are
    never peaks.
    """
    data = np.asarray(data, dtype=np.float64)
    m = data.shape[0]
    out = np.zeros(data.shape, dtype=bool)
    if m < 3:
        return out
    step = np.sign(np.diff(data, axis=0))  # step[i] = sign(data[i+1] - data[i])
    # sign of the first non-zero step at or after each position (0 if none)
    idx = np.where(step != 0, np.arange(m - 1)[:, None], m - 1)
    idx = np.minimum.accumulate(idx[::-1], axis=0)[::-1]
    padded = np.vstack([step, np.zeros((1, step.shape[1]))])
    ahead = np.take_along_axis(padded, idx, axis=0)
    out[1:-1] = (step[:-1] > 0) & (ahead[1:] < 0) & (data[1:-1] > min_height)
    return out


def extract_peaks(c: Chromatogram, min_height: float = 0.0) -> PeakMap:
    if min_height < 0 or not math.isfinite(min_height):
        raise ValueError(f"min_height must be finite and >= 0, got {min_height}")
    mask = column_peak_mask(c.data, min_height)
    cols, rows = np.nonzero(mask.T)  # column-major order gives (col, row) sorting
    return PeakMap(c.sample_id, c.dims, rows, cols, c.data[rows, cols])


def peakmap_from_dense(source_id: str, dense: np.ndarray) -> PeakMap:
    """Rebuild a PeakMap from its dense view (non-zero cells are peaks)."""
    dense = np.asarray(dense, dtype=np.float64)
    cols, rows = np.nonzero(dense.T)
    return PeakMap(source_id, dense.shape, rows, cols, dense[rows, cols])


def _window_length(n: int, w: int) -> int:
    if not isinstance(w, (int, np.integer)) or w <= 0 or w > n:
        raise ValueError(f"window count must be an integer in [1, {n}], got {w!r}")
    return n // w


def max_along_interval(column, w: int) -> np.ndarray:
    """Replace each window of length ``len(column) // w`` by its maximum.

    A trailing partial window is kept, so the output has
    ``ceil(n / (n // w))`` entries.
    """
    column = np.asarray(column, dtype=np.float64)
    if column.ndim != 1 or column.size < 1:
        raise ValueError("column must be a non-empty 1-D vector")
    return max_along_interval_columns(column[:, None], w)[:, 0]


def max_along_interval_columns(data: np.ndarray, w: int) -> np.ndarray:
    """Column-wise ``max_along_interval`` of an M x N array."""
    data = np.asarray(data, dtype=np.float64)
    m, n = data.shape
    length = _window_length(m, w)
    k = -(-m // length)
    padded = np.full((k * length, n), -np.inf)
    padded[:m] = data
    return padded.reshape(k, length, n).max(axis=1)


def save_peakmap(pm: PeakMap, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# source_id={pm.source_id}\n")
        fh.write(f"# dims={pm.dims[0]}x{pm.dims[1]}\n")
        fh.write("row,col,height\n")
        for r, c, h in zip(pm.rows.tolist(), pm.cols.tolist(), pm.heights.tolist()):
            fh.write(f"{r},{c},{h!r}\n")


def load_peakmap(path: str | os.PathLike) -> PeakMap:
    meta = {}
    rows, cols, heights = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line.lstrip("#").strip().partition("=")
                meta[k.strip()] = v.strip()
                continue
            if line.startswith("row"):
                continue
            r, c, h = line.split(",")
            rows.append(int(r))
            cols.append(int(c))
            heights.append(float(h))
    m, n = (int(x) for x in meta["dims"].split("x"))
    return PeakMap(meta.get("source_id", Path(path).stem), (m, n), rows, cols, heights)


def check_same_dims(a: PeakMap, b: PeakMap) -> None:
    if a.dims != b.dims:
        raise DimensionMismatch(a.dims, b.dims)
