import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import chrom
from qptm.peaks import (
    PeakMap,
    column_peak_mask,
    extract_peaks,
    load_peakmap,
    max_along_interval,
    max_along_interval_columns,
    peakmap_from_dense,
    save_peakmap,
)


def naive_peaks(col, min_height=0.0):
    """Plateau-aware local maxima by direct scanning."""
    out = []
    i, m = 1, len(col)
    while i < m - 1:
        if col[i] > col[i - 1]:
            j = i
            while j + 1 < m and col[j + 1] == col[i]:
                j += 1
            if j + 1 < m and col[j + 1] < col[i] and col[i] > min_height:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def test_simple_column():
    c = chrom(np.array([[0, 1, 0, 2, 5, 2, 0]], dtype=float).T)
    pm = extract_peaks(c)
    assert [(p.row, p.col, p.height) for p in pm.peaks] == [(1, 0, 1.0), (4, 0, 5.0)]


def test_plateau_counts_once_at_its_start():
    col = np.array([0, 3, 3, 3, 1, 4, 4, 5])
    mask = column_peak_mask(col[:, None])[:, 0]
    assert np.flatnonzero(mask).tolist() == [1]


def test_edges_and_flat_columns_have_no_peaks():
    assert not column_peak_mask(np.array([[5.0], [1.0], [5.0]])).any()
    assert not column_peak_mask(np.ones((6, 3))).any()
    assert not column_peak_mask(np.ones((2, 3))).any()


def test_min_height_filter():
    c = chrom(np.array([[0, 1, 0, 9, 0]], dtype=float).T)
    assert len(extract_peaks(c, min_height=1.0)) == 1
    with pytest.raises(ValueError):
        extract_peaks(c, min_height=-1)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 5)),
              elements=st.integers(0, 4).map(float)))
def test_vectorized_mask_matches_scan(data):
    mask = column_peak_mask(data)
    for j in range(data.shape[1]):
        assert np.flatnonzero(mask[:, j]).tolist() == naive_peaks(data[:, j])


def test_peakmap_invariants():
    with pytest.raises(ValueError):
        PeakMap("x", (3, 3), [0], [0], [0.0])
    with pytest.raises(ValueError):
        PeakMap("x", (3, 3), [3], [0], [1.0])
    with pytest.raises(ValueError):
        PeakMap("x", (3, 3), [1, 1], [2, 2], [1.0, 2.0])
    pm = PeakMap("x", (3, 3), [2, 0, 1], [1, 1, 0], [1.0, 2.0, 3.0])
    assert [(p.row, p.col) for p in pm.peaks] == [(1, 0), (0, 1), (2, 1)]
    assert pm.dense_view[2, 1] == 1.0 and pm.mask.sum() == 3
    assert peakmap_from_dense("x", pm.dense_view) == pm


def test_peakmap_file_round_trip(tmp_path):
    pm = PeakMap("abc", (5, 4), [1, 3], [0, 2], [0.1, 1234.5678])
    save_peakmap(pm, tmp_path / "p.csv")
    assert load_peakmap(tmp_path / "p.csv") == pm


def test_max_along_interval_keeps_trailing_window():
    col = np.array([1, 5, 2, 0, 7, 3, 9.0])
    # n = 7, w = 3 -> L = 2 -> windows [1,5] [2,0] [7,3] [9]
    assert max_along_interval(col, 3).tolist() == [5, 2, 7, 9]
    assert max_along_interval(col, 7).tolist() == col.tolist()
    assert max_along_interval(col, 1).tolist() == [9]
    with pytest.raises(ValueError):
        max_along_interval(col, 8)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(1, 4)),
              elements=st.floats(0, 100)), st.data())
def test_max_along_interval_oracle(data, draw):
    m = data.shape[0]
    w = draw.draw(st.integers(1, m))
    length = m // w
    expected = np.array([[data[i:i + length, j].max() for j in range(data.shape[1])]
                         for i in range(0, m, length)])
    assert np.array_equal(max_along_interval_columns(data, w), expected)
