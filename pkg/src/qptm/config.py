from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Mapping


class MethodId(str, Enum):
    QPTM = "qptm"
    SAX = "sax"
    PAA = "paa"
    L2 = "l2"
    CORR2 = "corr2"
    PCA = "pca"

    @property
    def is_distance(self) -> bool:
        return self in (MethodId.QPTM, MethodId.SAX, MethodId.PAA, MethodId.L2)

    @classmethod
    def parse(cls, name: "str | MethodId") -> "MethodId":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            if str(name).lower() == "ptm":
                raise ValueError(
                    "method 'ptm' (PTM score) is out of scope: no formula is available for it"
                ) from None
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown method {name!r}; choose from {choices}") from None


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters for one scoring / classification run."""

    method: MethodId = MethodId.QPTM
    epsilon: float = 0.5
    theta: float = 96.0
    alphabet_size: int = 10
    word_length_divisor: int = 8
    min_peak_height: float = 0.0
    sax_table_semantics: str = "squared"
    paa_dist_scaled: bool = False
    znormalize: bool = True
    znorm_scope: str = "image"
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", MethodId.parse(self.method))
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0 <= self.theta <= 100:
            raise ValueError(f"theta must be a percentage in [0, 100], got {self.theta}")
        if not 2 <= self.alphabet_size <= 26:
            raise ValueError(f"alphabet_size must be in [2, 26], got {self.alphabet_size}")
        if self.word_length_divisor < 1:
            raise ValueError("word_length_divisor must be >= 1")
        if self.min_peak_height < 0:
            raise ValueError("min_peak_height must be >= 0")
        if self.sax_table_semantics not in ("squared", "gap"):
            raise ValueError("sax_table_semantics must be 'squared' or 'gap'")
        if self.znorm_scope not in ("image", "column"):
            raise ValueError("znorm_scope must be 'image' or 'column'")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def word_length(self, m: int) -> int:
        """Number of PAA/SAX windows for a column of length m."""
        return min(m, max(1, m // self.word_length_divisor))

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self, include_threads: bool = False) -> dict[str, Any]:
        # threads never changes results, so reports leave it out
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["method"] = self.method.value
        if not include_threads:
            d.pop("threads")
        return d

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return dataclasses.replace(base or cls(), **dict(data))

    @classmethod
    def from_file(cls, path: str | os.PathLike, base: "RunConfig | None" = None) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh), base)


def field_defaults() -> dict[str, Any]:
    return RunConfig().to_dict(include_threads=True)
