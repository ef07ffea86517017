"""Reference comparators: whole-image L2, 2-D correlation and a two-component PCA score."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chromatogram import Chromatogram, DimensionMismatch, check_same_dims


class DegenerateImageError(ValueError):
    """Raised when a correlation is undefined because an image is constant."""


def l2_dist(a: Chromatogram, b: Chromatogram) -> float:
    check_same_dims(a, b)
    return float(np.sqrt(np.sum((a.data - b.data) ** 2)))


def corr2(a: Chromatogram, b: Chromatogram) -> float:
    """Pearson correlation over all pixels of two equally sized images."""
    check_same_dims(a, b)
    da = a.data - a.data.mean()
    db = b.data - b.data.mean()
    saa = np.sum(da * da)
    sbb = np.sum(db * db)
    if saa == 0 or sbb == 0:
        which = a.sample_id if saa == 0 else b.sample_id
        raise DegenerateImageError(f"image {which!r} is constant; correlation undefined")
    r = np.sum(da * db) / np.sqrt(saa * sbb)
    return float(np.clip(r, -1.0, 1.0))


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm is below ``tol`` times the
    norm of ``a``. Returns ``(eigenvalues, eigenvectors)`` sorted descending,
    eigenvectors as columns.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=1e-10, atol=0):
        raise ValueError("matrix must be symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return -vec if vec[k] < 0 else vec


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray = field(repr=False)
    components: np.ndarray = field(repr=False)  # 2 x P, rows orthonormal
    explained: np.ndarray
    dims: tuple[int, int]

    def scores(self, c: Chromatogram) -> np.ndarray:
        if c.dims != self.dims:
            raise DimensionMismatch(c.dims, self.dims)
        return self.components @ (c.data.ravel() - self.mean)


def fit_pca(collection: Sequence[Chromatogram], n_components: int = 2) -> PcaModel:
    """Top principal directions of flattened images via the samples x samples Gram matrix."""
    if len(collection) < 3:
        raise ValueError(f"PCA needs at least 3 images, got {len(collection)}")
    for c in collection:
        check_same_dims(collection[0], c)
    x = np.stack([c.data.ravel() for c in collection])
    mean = x.mean(axis=0)
    xc = x - mean
    s = x.shape[0]
    lam, u = jacobi_eigh(xc @ xc.T / (s - 1))
    lam = np.clip(lam, 0.0, None)
    floor = 1e-12 * max(lam[0], 1e-300)
    comps, explained = [], []
    for k in range(n_components):
        if k < s and lam[k] > floor:
            vec = xc.T @ u[:, k]
            explained.append(lam[k])
        else:
            # null direction: first basis vector with a non-trivial residual
            for e in range(x.shape[1]):
                vec = np.zeros(x.shape[1])
                vec[e] = 1.0
                for prev in comps:
                    vec -= (prev @ vec) * prev
                if np.linalg.norm(vec) > 1e-6:
                    break
            explained.append(0.0)
        for prev in comps:
            vec = vec - (prev @ vec) * prev
        comps.append(_fix_sign(vec / np.linalg.norm(vec)))
    return PcaModel(mean, np.stack(comps), np.array(explained), collection[0].dims)


def pca_similarity(model: PcaModel, a: Chromatogram, b: Chromatogram) -> float:
    """Pearson correlation between the principal-component score vectors of ``a`` and ``b``.

    With two components this is a correlation of two 2-vectors, which is
    always +1 or -1 unless one score pair is constant (reported as 1.0).
    """
    check_same_dims(a, b)
    sa, sb = model.scores(a), model.scores(b)
    if np.array_equal(sa, sb):
        return 1.0
    ca, cb = sa - sa.mean(), sb - sb.mean()
    na, nb = np.linalg.norm(ca), np.linalg.norm(cb)
    if na <= 1e-12 * np.linalg.norm(sa) or nb <= 1e-12 * np.linalg.norm(sb) or na == 0 or nb == 0:
        return 1.0
    return float(np.clip(ca @ cb / (na * nb), -1.0, 1.0))
