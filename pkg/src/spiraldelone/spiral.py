"""Spiral point sets s_k = k^(1/n) u_k built from a spherical sequence.

A source only has to say how to produce unit vectors u_k for a batch of
indices; everything else (radii, prefixes, provenance) lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, Sequence, Tuple

import numpy as np

from .geom import DimensionError, UnitVector, normalize_rows
from .lift import LiftedSequence

MAX_COUNT = 10**7
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class SphericalSource:
    """Base class: an indexed sequence of unit vectors in R^dim, k >= 1."""

    kind = "abstract"
    dim: int

    def u_array(self, ks) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def u(self, k: int) -> UnitVector:
        return UnitVector(tuple(self.u_array([k])[0]))

    def params(self) -> Dict[str, object]:
        return {}

    def describe(self) -> Dict[str, object]:
        return {"kind": self.kind, "dim": self.dim, **self.params()}


def _indices(ks) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if ks.size and ks.min() < 1:
        raise ValueError("indices start at 1")
    return ks


@dataclass(frozen=True)
class FermatSource(SphericalSource):
    """Planar directions at angle k*alpha, in turns (default) or radians.

    In turns u_k = e(k alpha) = (cos 2 pi k alpha, sin 2 pi k alpha). The
    radian variant uses the angle k*alpha directly, which is how the
    classic sunflower plots with the golden ratio are usually drawn; it
    equals the turn variant for alpha / (2 pi).
    """

    alpha: float
    unit: str = "turn"
    label: str = ""
    kind = "fermat"
    dim = 2

    def __post_init__(self):
        if self.unit not in ("turn", "radian"):
            raise ValueError("unit must be 'turn' or 'radian'")

    def angles(self, ks) -> np.ndarray:
        ks = _indices(ks).astype(float)
        if self.unit == "turn":
            return 2.0 * np.pi * np.mod(ks * self.alpha, 1.0)
        return np.mod(ks * self.alpha, 2.0 * np.pi)

    def u_array(self, ks) -> np.ndarray:
        a = self.angles(ks)
        return np.column_stack((np.cos(a), np.sin(a)))

    def params(self):
        return {"alpha": self.alpha, "unit": self.unit, "label": self.label}


def fermat_u(k: int, alpha: float, unit: str = "turn") -> UnitVector:
    if k < 1:
        raise ValueError("indices start at 1")
    return FermatSource(alpha, unit).u(k)


@dataclass(frozen=True)
class LiftedSource(SphericalSource):
    seq: LiftedSequence
    kind = "lifted"

    @property
    def dim(self) -> int:
        return self.seq.n

    def u_array(self, ks) -> np.ndarray:
        return self.seq.u_array(_indices(ks))

    def params(self):
        a = self.seq.alpha
        return {"alpha": list(a.alpha), "label": a.label, "min_poly": list(a.min_poly)}


@dataclass(frozen=True)
class ListSource(SphericalSource):
    """A finite, precomputed sequence; u_k is row k-1."""

    vectors: np.ndarray
    kind: str = "custom"
    meta: Tuple[Tuple[str, object], ...] = ()

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValueError("need a nonempty (N, n) array")
        if v.shape[1] < 2:
            raise DimensionError("unit vectors need dimension >= 2")
        if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > 1e-12:
            raise ValueError("rows must be unit vectors")
        v = normalize_rows(v)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    def u_array(self, ks) -> np.ndarray:
        ks = _indices(ks)
        if ks.size and ks.max() > len(self):
            raise IndexError(f"source holds only {len(self)} vectors")
        return self.vectors[ks - 1]

    def params(self):
        return dict(self.meta)


@dataclass(frozen=True)
class ConstantSource(SphericalSource):
    """u_k = direction for every k; a deliberately degenerate source."""

    direction: Tuple[float, ...]
    kind = "constant"

    @property
    def dim(self) -> int:
        return len(self.direction)

    def u_array(self, ks) -> np.ndarray:
        ks = _indices(ks)
        return np.tile(np.asarray(UnitVector(self.direction)), (ks.size, 1))

    def params(self):
        return {"direction": list(self.direction)}


def radii(ks, n: int) -> np.ndarray:
    return np.asarray(ks, dtype=float) ** (1.0 / n)


def spiral_point(k: int, source: SphericalSource) -> np.ndarray:
    if k < 1:
        raise ValueError("indices start at 1")
    return radii([k], source.dim)[:, None][0] * source.u_array([k])[0]


@dataclass(frozen=True)
class SpiralSet:
    """The prefix s_1, ..., s_N of a spiral set; row k-1 holds s_k."""

    source: SphericalSource
    points: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    @property
    def directions(self) -> np.ndarray:
        return self.points / self.norms[:, None]

    def point(self, k: int) -> np.ndarray:
        return self.points[k - 1]

    def __iter__(self) -> Iterator[Tuple[int, np.ndarray]]:
        return zip(self.indices.tolist(), self.points)


def generate(source: SphericalSource, count: int, max_count: int = MAX_COUNT) -> SpiralSet:
    """Materialise s_1 .. s_count; identical inputs give identical bytes."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > max_count:
        raise MemoryError(f"count {count} exceeds the budget of {max_count} points")
    ks = np.arange(1, count + 1, dtype=np.int64)
    pts = radii(ks, source.dim)[:, None] * source.u_array(ks)
    pts.setflags(write=False)
    return SpiralSet(source, pts)


@dataclass(frozen=True)
class RatioScan:
    """Tail estimates of f(k) / k^(1/n). Unpacks as (liminf, limsup)."""

    liminf: float
    limsup: float
    growth: float
    decay: float
    unbounded: bool

    def __iter__(self):
        return iter((self.liminf, self.limsup))


def akiyama_ratio_scan(f_values: Sequence[Tuple[int, float]], n: int, drift_tol: float = 0.1) -> RatioScan:
    """Estimate liminf/limsup of f(k)/k^(1/n) from a finite prefix.

    The estimates are the min and max over the tail half k > k_max / 2.
    ``growth`` (``decay``) compares the tail max (min) with the preceding
    quarter k in (k_max/4, k_max/2]; a drift beyond ``drift_tol`` flags the
    ratio as not bounded away from 0 and infinity.
    """
    arr = np.asarray(f_values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("need a nonempty list of (k, f(k)) pairs")
    k, f = arr[:, 0], arr[:, 1]
    if np.any(np.diff(k) <= 0):
        raise ValueError("k must be strictly increasing")
    if np.any(f <= 0):
        raise ValueError("f(k) must be positive")
    ratio = f / k ** (1.0 / n)
    k_max = k[-1]
    tail = ratio[k > k_max / 2]
    prev = ratio[(k > k_max / 4) & (k <= k_max / 2)]
    lo, hi = float(tail.min()), float(tail.max())
    growth = hi / float(prev.max()) if prev.size else 1.0
    decay = float(prev.min()) / lo if prev.size else 1.0
    unbounded = growth > 1.0 + drift_tol or decay > 1.0 + drift_tol
    return RatioScan(lo, hi, growth, decay, unbounded)
