"""Synthetic GC x GC images from a sum of separable Gaussian peaks.

Each sample is ``sum_k h_k * g_k * exp(-(r - r_k)^2 / 2 sr_k^2 - (c - c_k)^2 / 2 sc_k^2)``
plus Gaussian baseline noise, clipped at zero. The per-peak multiplier
``g_k`` is drawn uniformly from ``[1, 1 + height_jitter]``, so the ratio of
any co-located peak pair across two samples of a family never exceeds
``1 + height_jitter``.

All randomness comes from numpy's PCG64 generator seeded through
``SeedSequence``; sample ``i`` of a family uses the stream
``default_rng([family.seed, i])`` so samples can be rendered independently.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .chromatogram import Chromatogram, SourceLibrary, save_chromatogram, write_manifest


@dataclass(frozen=True)
class PeakSpec:
    center: tuple[float, float]  # (row, col)
    height: float
    sigma_row: float
    sigma_col: float

    def __post_init__(self):
        if not self.height > 0:
            raise ValueError(f"peak height must be positive, got {self.height}")
        if not (self.sigma_row > 0 and self.sigma_col > 0):
            raise ValueError("peak sigmas must be positive")

    def to_dict(self) -> dict:
        return {
            "row": self.center[0],
            "col": self.center[1],
            "height": self.height,
            "sigma_row": self.sigma_row,
            "sigma_col": self.sigma_col,
        }


@dataclass(frozen=True)
class FamilySpec:
    family_id: str
    shared_peaks: tuple[PeakSpec, ...] = ()
    source_peaks: tuple[PeakSpec, ...] = ()
    height_jitter: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "shared_peaks", tuple(self.shared_peaks))
        object.__setattr__(self, "source_peaks", tuple(self.source_peaks))
        for name in ("height_jitter", "noise_sigma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    @property
    def peaks(self) -> tuple[PeakSpec, ...]:
        return self.shared_peaks + self.source_peaks


def _check_bounds(p: PeakSpec, dims: tuple[int, int]) -> None:
    m, n = dims
    r, c = p.center
    mr, mc = 3 * p.sigma_row, 3 * p.sigma_col
    if not (mr <= r <= m - 1 - mr and mc <= c <= n - 1 - mc):
        raise ValueError(
            f"peak at ({r}, {c}) with sigmas ({p.sigma_row}, {p.sigma_col}) "
            f"does not fit a {m}x{n} image with a 3-sigma margin"
        )


def render_one(peaks: Sequence[PeakSpec], dims: tuple[int, int], rng: np.random.Generator,
               height_jitter: float = 0.0, noise_sigma: float = 0.0) -> tuple[np.ndarray, list[PeakSpec]]:
    m, n = dims
    rows = np.arange(m, dtype=np.float64)
    cols = np.arange(n, dtype=np.float64)
    img = np.zeros((m, n))
    planted = []
    mult = 1.0 + rng.uniform(0.0, 1.0, size=len(peaks)) * height_jitter
    for p, g in zip(peaks, mult):
        h = p.height * g
        gr = np.exp(-((rows - p.center[0]) ** 2) / (2 * p.sigma_row**2))
        gc = np.exp(-((cols - p.center[1]) ** 2) / (2 * p.sigma_col**2))
        img += h * np.outer(gr, gc)
        planted.append(PeakSpec(p.center, float(h), p.sigma_row, p.sigma_col))
    if noise_sigma > 0:
        img += rng.normal(0.0, noise_sigma, size=dims)
    np.clip(img, 0.0, None, out=img)
    return img, planted


def render(spec: FamilySpec, dims: tuple[int, int], count: int,
           start: int = 0) -> tuple[list[Chromatogram], list[list[PeakSpec]]]:
    """Render ``count`` samples of a family; returns images and the planted (jittered) peaks."""
    if count < 1:
        raise ValueError("count must be positive")
    for p in spec.peaks:
        _check_bounds(p, dims)
    images, truth = [], []
    for i in range(start, start + count):
        rng = np.random.default_rng([spec.seed, i])
        img, planted = render_one(spec.peaks, dims, rng, spec.height_jitter, spec.noise_sigma)
        images.append(Chromatogram(f"{spec.family_id}-{i:02d}", spec.family_id, img))
        truth.append(planted)
    return images, truth


def lattice_centers(dims: tuple[int, int], row_step: int, col_step: int,
                    margin_row: int, margin_col: int) -> list[tuple[int, int]]:
    m, n = dims
    rs = range(margin_row, m - margin_row, row_step)
    cs = range(margin_col, n - margin_col, col_step)
    return [(r, c) for c in cs for r in rs]


def gulf_families(
    n_families: int = 3,
    dims: tuple[int, int] = (200, 100),
    n_peaks: int = 25,
    shared_fraction: float = 0.8,
    height_jitter: float = 0.3,
    noise: float = 0.01,
    max_height: float = 1000.0,
    seed: int = 0,
    height_range: tuple[float, float] = (0.2, 1.0),
    sigma_row_range: tuple[float, float] = (1.2, 2.0),
    sigma_col_range: tuple[float, float] = (1.0, 1.6),
) -> list[FamilySpec]:
    """Families that share a regional set of peaks and differ in a few source-specific ones.

    Peaks sit on a lattice (12 rows x 10 columns per cell) with
    sigma_row <= 2 and sigma_col <= 1.6, so neighbours are at least 6 sigma
    apart. Shared peaks have identical nominal heights in every family;
    ``noise`` is the baseline noise std as a fraction of ``max_height``.
    """
    if n_families < 1:
        raise ValueError("need at least one family")
    rng = np.random.default_rng([seed, 0xFA])
    cells = lattice_centers(dims, 12, 10, 7, 6)
    n_shared = int(round(shared_fraction * n_peaks))
    n_source = n_peaks - n_shared
    need = n_shared + n_families * n_source
    if need > len(cells):
        raise ValueError(f"{dims[0]}x{dims[1]} holds {len(cells)} peak sites, {need} requested")
    chosen = rng.permutation(len(cells))[:need]

    def make(cell_idx):
        r, c = cells[cell_idx]
        return PeakSpec(
            (float(r), float(c)),
            float(max_height * rng.uniform(*height_range)),
            float(rng.uniform(*sigma_row_range)),
            float(rng.uniform(*sigma_col_range)),
        )

    shared = tuple(make(k) for k in chosen[:n_shared])
    families = []
    for f in range(n_families):
        lo = n_shared + f * n_source
        source = tuple(make(k) for k in chosen[lo:lo + n_source])
        fam_seed = int(np.random.SeedSequence([seed, f]).generate_state(1)[0])
        families.append(FamilySpec(f"F{f + 1}", shared, source, height_jitter,
                                   noise * max_height, fam_seed))
    return families


@dataclass
class Benchmark:
    """Library templates (first sample of each family) plus the remaining labelled samples."""

    library: SourceLibrary
    tests: list[Chromatogram]
    samples: list[Chromatogram]  # every sample, family-major order
    truth: dict[str, list[PeakSpec]] = field(repr=False)

    def write(self, out: str | os.PathLike) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        for c in self.samples:
            save_chromatogram(c, out / f"{c.sample_id}.csv")
        lib_ids = {c.sample_id for c in self.library}
        write_manifest(out / "manifest.json", [(f"{c.sample_id}.csv", c.region) for c in self.samples])
        write_manifest(out / "library.json", [(f"{c.sample_id}.csv", c.region) for c in self.library])
        write_manifest(out / "tests.json", [(f"{c.sample_id}.csv", c.region) for c in self.tests])
        truth = {
            "samples": [
                {
                    "sample_id": c.sample_id,
                    "region": c.region,
                    "template": c.sample_id in lib_ids,
                    "peaks": [p.to_dict() for p in self.truth[c.sample_id]],
                }
                for c in self.samples
            ]
        }
        with open(out / "truth.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(truth, fh, indent=1)
            fh.write("\n")


def make_benchmark(families: Sequence[FamilySpec], dims: tuple[int, int], per_family: int) -> Benchmark:
    if len(families) < 2:
        raise ValueError("a benchmark needs at least two families")
    if per_family < 1:
        raise ValueError("per_family must be positive")
    templates, tests, samples, truth = [], [], [], {}
    for fam in families:
        images, planted = render(fam, dims, per_family)
        templates.append(images[0])
        tests.extend(images[1:])
        samples.extend(images)
        truth.update({c.sample_id: p for c, p in zip(images, planted)})
    return Benchmark(SourceLibrary.from_entries(templates), tests, samples, truth)
