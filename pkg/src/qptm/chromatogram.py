"""2-D intensity images (GC x GC chromatograms), source libraries and their file I/O.

On disk a chromatogram is a plain CSV matrix (one line per matrix row, rows
are the second retention-time axis) with an optional ``<name>.json`` sidecar
holding ``sample_id`` and ``region``. A library manifest is a JSON array of
``{"path": ..., "region": ...}`` objects in reference order.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np


class ChromatogramError(ValueError):
    """Base class for invalid chromatogram data."""


class ParseError(ChromatogramError):
    def __init__(self, path, row: int, col: int | None, msg: str):
        self.path, self.row, self.col = path, row, col
        where = f"line {row}" if col is None else f"line {row}, column {col}"
        super().__init__(f"{path}: {where}: {msg}")


class ValidationError(ChromatogramError):
    pass


class DimensionMismatch(ChromatogramError):
    def __init__(self, a: tuple[int, int], b: tuple[int, int]):
        self.dims = (a, b)
        super().__init__(f"dimension mismatch: {a[0]}x{a[1]} vs {b[0]}x{b[1]}")


class LibraryError(ChromatogramError):
    pass


@dataclass(frozen=True, eq=False)
class Chromatogram:
    """Dense M x N non-negative intensity image with sample metadata.

    Row index is the second retention time, column index the first. The
    array is copied to float64 and frozen on construction.
    """

    sample_id: str
    region: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValidationError(f"data must be 2-D, got shape {arr.shape}")
        m, n = arr.shape
        if m < 2 or n < 1:
            raise ValidationError(f"need at least 2 rows and 1 column, got {m}x{n}")
        bad = ~np.isfinite(arr) | (arr < 0)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise ValidationError(
                f"intensity at row {r}, column {c} must be finite and >= 0, got {arr[r, c]!r}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def dims(self) -> tuple[int, int]:
        return self.data.shape

    def with_data(self, data: np.ndarray) -> "Chromatogram":
        return Chromatogram(self.sample_id, self.region, data)

    def __eq__(self, other):
        if not isinstance(other, Chromatogram):
            return NotImplemented
        return (
            self.sample_id == other.sample_id
            and self.region == other.region
            and self.dims == other.dims
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


def check_same_dims(a: Chromatogram, b: Chromatogram) -> None:
    if a.dims != b.dims:
        raise DimensionMismatch(a.dims, b.dims)


@dataclass(frozen=True)
class SourceLibrary:
    """Ordered reference templates I_1..I_K with their region labels."""

    entries: tuple[Chromatogram, ...]
    regions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.entries:
            raise LibraryError("library must contain at least one entry")
        if len(self.regions) != len(self.entries):
            raise LibraryError(
                f"{len(self.entries)} entries but {len(self.regions)} region labels"
            )
        for k, (c, r) in enumerate(zip(self.entries, self.regions)):
            if c.region != r:
                raise LibraryError(f"entry {k} has region {c.region!r}, expected {r!r}")
            check_same_dims(self.entries[0], c)

    @classmethod
    def from_entries(cls, entries: Sequence[Chromatogram]) -> "SourceLibrary":
        return cls(tuple(entries), tuple(c.region for c in entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Chromatogram]:
        return iter(self.entries)

    def __getitem__(self, k: int) -> Chromatogram:
        return self.entries[k]


def sidecar_path(path: str | os.PathLike) -> Path:
    return Path(path).with_suffix(".json")


def _parse_csv(path: Path) -> tuple[np.ndarray, dict]:
    header = {}
    rows: list[list[float]] = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                # "# key=value" or "# key: value" metadata lines
                body = stripped.lstrip("#").strip()
                for sep in ("=", ":"):
                    if sep in body:
                        k, v = body.split(sep, 1)
                        header[k.strip()] = v.strip()
                        break
                continue
            cells = next(csv.reader([stripped]))
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(path, lineno, None, f"expected {width} values, found {len(cells)}")
            vals = []
            for col, cell in enumerate(cells):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(path, lineno, col, f"not a number: {cell!r}") from None
                if not math.isfinite(v) or v < 0:
                    raise ValidationError(
                        f"{path}: line {lineno}, column {col}: intensity must be finite and >= 0, got {cell!r}"
                    )
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError(path, 0, None, "no data rows")
    return np.array(rows, dtype=np.float64), header


def load_chromatogram(path: str | os.PathLike) -> Chromatogram:
    path = Path(path)
    data, header = _parse_csv(path)
    meta = {"sample_id": header.get("sample_id", path.stem), "region": header.get("region", "")}
    side = sidecar_path(path)
    if side.exists():
        with open(side, encoding="utf-8") as fh:
            meta.update(json.load(fh))
    return Chromatogram(str(meta["sample_id"]), str(meta["region"]), data)


def save_chromatogram(c: Chromatogram, path: str | os.PathLike) -> None:
    """Write ``c`` as CSV plus a JSON sidecar.

    Values are written with ``repr`` (shortest round-trip form), so
    ``load_chromatogram`` returns a bit-identical matrix.
    """
    if not c.sample_id:
        raise ValidationError("sample_id must be a non-empty string")
    path = Path(path)
    lines = [",".join(map(repr, row)) for row in c.data.tolist()]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"sample_id": c.sample_id, "region": c.region}, fh, indent=2)
        fh.write("\n")


def load_library(manifest_path: str | os.PathLike) -> SourceLibrary:
    """Load a manifest; relative paths resolve against the manifest's directory."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        items = json.load(fh)
    if not isinstance(items, list) or not items:
        raise LibraryError(f"{manifest_path}: manifest must be a non-empty JSON array")
    base = manifest_path.parent
    entries = []
    for k, item in enumerate(items):
        p = base / item["path"]
        if not p.exists():
            raise LibraryError(f"{manifest_path}: entry {k}: file not found: {p}")
        c = load_chromatogram(p)
        region = item.get("region", c.region)
        entries.append(Chromatogram(c.sample_id, region, c.data))
        if entries[0].dims != c.dims:
            raise LibraryError(
                f"{manifest_path}: entry {k} is {c.m}x{c.n}, "
                f"entry 0 is {entries[0].m}x{entries[0].n}"
            )
    return SourceLibrary.from_entries(entries)


def write_manifest(path: str | os.PathLike, items: Sequence[tuple[str, str]]) -> None:
    """Write a manifest of ``(relative_path, region)`` pairs."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump([{"path": p, "region": r} for p, r in items], fh, indent=2)
        fh.write("\n")
