"""PAA / SAX representations and their distances.

Breakpoints are standard-normal quantiles at k/alpha. By default they are
rounded to two decimals, the precision of the classic SAX breakpoint
tables; with ``alpha=10`` this regenerates the familiar symbol-distance
lookup table to four decimals. Pass ``decimals=None`` for exact quantiles.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.stats import norm

TableSemantics = Literal["squared", "gap"]
ZNORM_EPS = 1e-12
LETTERS = string.ascii_lowercase


@dataclass(frozen=True, eq=False)
class Alphabet:
    size: int
    breakpoints: np.ndarray = field(repr=False)
    dist_table: np.ndarray = field(repr=False)

    @property
    def letters(self) -> str:
        return LETTERS[: self.size]

    def lookup(self, a: str, b: str) -> float:
        return float(self.dist_table[LETTERS.index(a), LETTERS.index(b)])

    def to_csv(self) -> str:
        """Symbol-distance table in the usual printed layout (header row of letters)."""
        lines = ["Alphabet," + ",".join(self.letters)]
        for i, ch in enumerate(self.letters):
            lines.append(ch + "," + ",".join(f"{v:.4f}" for v in self.dist_table[i]))
        return "\n".join(lines) + "\n"


def make_alphabet(alpha: int, decimals: int | None = 2) -> Alphabet:
    if not isinstance(alpha, (int, np.integer)) or not 2 <= alpha <= len(LETTERS):
        raise ValueError(f"alphabet size must be an integer in [2, 26], got {alpha!r}")
    bp = norm.ppf(np.arange(1, alpha) / alpha)
    if decimals is not None:
        bp = np.round(bp, decimals) + 0.0  # + 0.0 turns -0.0 into 0.0
    idx = np.arange(alpha)
    hi = np.maximum.outer(idx, idx)
    lo = np.minimum.outer(idx, idx)
    table = np.zeros((alpha, alpha))
    far = (hi - lo) > 1
    table[far] = (bp[hi[far] - 1] - bp[lo[far]]) ** 2
    bp.setflags(write=False)
    table.setflags(write=False)
    return Alphabet(int(alpha), bp, table)


@dataclass(frozen=True, eq=False)
class PaaVector:
    values: np.ndarray
    original_length: int

    @property
    def window_count(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class SaxWord:
    symbols: np.ndarray
    alphabet_size: int
    original_length: int

    def __str__(self) -> str:
        return "".join(LETTERS[s] for s in self.symbols)

    def __eq__(self, other):
        if not isinstance(other, SaxWord):
            return NotImplemented
        return (
            self.alphabet_size == other.alphabet_size
            and self.original_length == other.original_length
            and np.array_equal(self.symbols, other.symbols)
        )

    __hash__ = None


def _check_w(n: int, w: int) -> None:
    if n < 1:
        raise ValueError("series must be non-empty")
    if not isinstance(w, (int, np.integer)) or not 1 <= w <= n:
        raise ValueError(f"word length must be an integer in [1, {n}], got {w!r}")


def paa_matrix(n: int, w: int) -> np.ndarray:
    """w x n averaging operator; sample j contributes to window i in proportion to their overlap.

    Coordinates are scaled by w so every overlap is an integer: window i is
    [i*n, (i+1)*n) and sample j is [j*w, (j+1)*w).
    """
    _check_w(n, w)
    i = np.arange(w)[:, None]
    j = np.arange(n)[None, :]
    overlap = np.minimum((i + 1) * n, (j + 1) * w) - np.maximum(i * n, j * w)
    return np.clip(overlap, 0, None) / n


def paa_columns(data: np.ndarray, w: int) -> np.ndarray:
    """PAA of every column of an n x N array, returned as w x N."""
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    _check_w(n, w)
    if n % w == 0:
        return data.reshape(w, n // w, *data.shape[1:]).mean(axis=1)
    return paa_matrix(n, w) @ data


def paa(series, w: int) -> PaaVector:
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    return PaaVector(paa_columns(x[:, None], w)[:, 0], x.size)


def znormalize(series) -> np.ndarray:
    """Zero mean, unit population std; near-constant input maps to zeros."""
    x = np.asarray(series, dtype=np.float64)
    return znormalize_columns(x[:, None])[:, 0]


def znormalize_columns(data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=np.float64)
    mu = data.mean(axis=0)
    sd = data.std(axis=0)
    flat = sd < ZNORM_EPS
    out = (data - mu) / np.where(flat, 1.0, sd)
    out[:, flat] = 0.0
    return out


def znormalize_image(data: np.ndarray) -> np.ndarray:
    """Standardize a whole image with one mean and std (near-constant input maps to zeros)."""
    data = np.asarray(data, dtype=np.float64)
    sd = data.std()
    if sd < ZNORM_EPS:
        return np.zeros_like(data)
    return (data - data.mean()) / sd


def symbolize(values: np.ndarray, abc: Alphabet) -> np.ndarray:
    # count of breakpoints strictly below each value; a value on a breakpoint takes the lower symbol
    return np.searchsorted(abc.breakpoints, values, side="left")


def sax_columns(data: np.ndarray, w: int, abc: Alphabet, normalize: bool = True) -> np.ndarray:
    """SAX symbols (w x N integer array) for every column of an n x N array."""
    data = np.asarray(data, dtype=np.float64)
    if normalize:
        data = znormalize_columns(data)
    return symbolize(paa_columns(data, w), abc)


def sax(series, w: int, abc: Alphabet, normalize: bool = True) -> SaxWord:
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    _check_w(x.size, w)
    return SaxWord(sax_columns(x[:, None], w, abc, normalize)[:, 0], abc.size, x.size)


def paa_dist(a: PaaVector, b: PaaVector, scaled: bool = False) -> float:
    """Euclidean distance of two PAA vectors; ``scaled`` adds the sqrt(n/w) factor."""
    if a.window_count != b.window_count:
        raise ValueError(f"PAA lengths differ: {a.window_count} vs {b.window_count}")
    d = float(np.sqrt(np.sum((a.values - b.values) ** 2)))
    if scaled:
        if a.original_length != b.original_length:
            raise ValueError("scaled PAA distance needs equal original lengths")
        d *= np.sqrt(a.original_length / a.window_count)
    return d


def _check_semantics(semantics: str) -> None:
    if semantics not in ("squared", "gap"):
        raise ValueError(f"table semantics must be 'squared' or 'gap', got {semantics!r}")


def sax_dist_columns(
    sa: np.ndarray, sb: np.ndarray, abc: Alphabet, n: int, semantics: TableSemantics = "squared"
) -> np.ndarray:
    """Per-column SAX distance between two w x N symbol arrays built from length-n columns.

    ``squared`` squares each table entry before summing, as the MINDIST
    formula is written against this table; ``gap`` treats table entries as
    squared breakpoint gaps and sums them directly (the lower-bounding form).
    """
    _check_semantics(semantics)
    if sa.shape != sb.shape:
        raise ValueError(f"SAX shapes differ: {sa.shape} vs {sb.shape}")
    d = abc.dist_table[sa, sb]
    if semantics == "squared":
        d = d * d
    w = sa.shape[0]
    return np.sqrt(n / w * d.sum(axis=0))


def sax_dist(a: SaxWord, b: SaxWord, abc: Alphabet, semantics: TableSemantics = "squared") -> float:
    if a.alphabet_size != abc.size or b.alphabet_size != abc.size:
        raise ValueError("words were not built with this alphabet")
    if a.original_length != b.original_length or a.symbols.size != b.symbols.size:
        raise ValueError("words differ in length or source length")
    d = sax_dist_columns(a.symbols[:, None], b.symbols[:, None], abc, a.original_length, semantics)
    return float(d[0])
