import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import chrom
from qptm.baselines import (
    DegenerateImageError,
    corr2,
    fit_pca,
    jacobi_eigh,
    l2_dist,
    pca_similarity,
)
from qptm.chromatogram import DimensionMismatch


def test_l2_and_corr2_by_hand():
    a = chrom([[0, 1], [2, 3]])
    b = chrom([[1, 1], [2, 3]])
    assert l2_dist(a, b) == 1.0
    assert corr2(a, a) == pytest.approx(1.0)
    assert corr2(a, chrom([[3, 2], [1, 0]])) == pytest.approx(-1.0)
    x, y = a.data.ravel(), b.data.ravel()
    assert corr2(a, b) == pytest.approx(np.corrcoef(x, y)[0, 1])


def test_corr2_constant_image_and_dims():
    with pytest.raises(DegenerateImageError):
        corr2(chrom(np.ones((2, 2))), chrom([[0, 1], [2, 3]]))
    with pytest.raises(DimensionMismatch):
        l2_dist(chrom(np.ones((2, 2))), chrom(np.ones((2, 3))))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.data())
def test_jacobi_matches_numpy(n, data):
    m = data.draw(arrays(np.float64, (n, n), elements=st.floats(-10, 10)))
    s = (m + m.T) / 2
    vals, vecs = jacobi_eigh(s)
    ref = np.sort(np.linalg.eigvalsh(s))[::-1]
    scale = max(1.0, np.abs(ref).max())
    assert np.allclose(vals, ref, atol=1e-9 * scale)
    assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-9)
    assert np.allclose(s @ vecs, vecs * vals, atol=1e-8 * scale)


def test_jacobi_rejects_non_symmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_pca_components_match_svd():
    rng = np.random.default_rng(4)
    imgs = [chrom(rng.random((6, 5)), f"s{k}") for k in range(7)]
    model = fit_pca(imgs)
    x = np.stack([c.data.ravel() for c in imgs])
    xc = x - x.mean(axis=0)
    _, sv, vt = np.linalg.svd(xc, full_matrices=False)
    for k in range(2):
        v = vt[k] * np.sign(vt[k][np.argmax(np.abs(vt[k]))])
        assert np.allclose(model.components[k], v, atol=1e-8)
    assert np.allclose(model.explained, sv[:2] ** 2 / 6)
    assert np.allclose(model.components @ model.components.T, np.eye(2), atol=1e-10)


def test_pca_rank_one_collection_gets_a_null_component():
    base = np.arange(12.0).reshape(3, 4)
    imgs = [chrom(base * k, f"s{k}") for k in (1, 2, 3)]
    model = fit_pca(imgs)
    assert model.explained[1] == 0.0
    assert abs(model.components[0] @ model.components[1]) < 1e-10


def test_pca_similarity_self_and_sign():
    rng = np.random.default_rng(5)
    imgs = [chrom(rng.random((4, 4)), f"s{k}") for k in range(5)]
    model = fit_pca(imgs)
    assert pca_similarity(model, imgs[0], imgs[0]) == 1.0
    assert abs(pca_similarity(model, imgs[0], imgs[1])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fit_pca(imgs[:2])
