"""Euclidean and spherical primitives in any dimension n >= 2.

The scalar types (:class:`UnitVector`, :class:`PolarPoint`,
:class:`SphericalCap`) are immutable and cheap to build; the heavy lifting in
the rest of the package runs on plain ``(N, n)`` float arrays through the
vectorised helpers at the bottom of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, stats
from scipy.stats import qmc

NORM_TOL = 1e-12
CAP_TOL = 1e-12

ArrayLike = Union[Sequence[float], np.ndarray, "UnitVector"]


class DimensionError(ValueError):
    """Raised when two objects that must share a dimension do not."""


class _ExactZero:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EXACT_ZERO"

    def __bool__(self):
        return False


#: Returned by :func:`polar_distance_ratio` when both sides of the ratio vanish.
EXACT_ZERO = _ExactZero()


@dataclass(frozen=True)
class UnitVector:
    """A point of the unit sphere in R^n, n >= 2.

    Inputs within ``NORM_TOL`` of unit length are re-normalised; anything
    further away is rejected. Use :meth:`from_vector` to project an arbitrary
    nonzero vector.
    """

    coords: tuple

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float).ravel()
        if x.size < 2:
            raise DimensionError(f"unit vectors need dimension >= 2, got {x.size}")
        norm = float(np.linalg.norm(x))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"|coords| = {norm!r} is not within {NORM_TOL} of 1")
        object.__setattr__(self, "coords", tuple(float(c) for c in x / norm))

    @classmethod
    def from_vector(cls, x) -> "UnitVector":
        x = np.asarray(x, dtype=float).ravel()
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return cls(tuple(x / norm))

    @classmethod
    def basis(cls, i: int, dim: int) -> "UnitVector":
        e = np.zeros(dim)
        e[i] = 1.0
        return cls(tuple(e))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __neg__(self):
        return UnitVector(tuple(-c for c in self.coords))


@dataclass(frozen=True)
class PolarPoint:
    """x = radius * direction. The origin is ``PolarPoint(0.0, None)``."""

    radius: float
    direction: Optional[UnitVector]

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if (self.radius == 0) != (self.direction is None):
            raise ValueError("only the origin (radius 0) may omit its direction")

    @property
    def cartesian(self) -> np.ndarray:
        if self.direction is None:
            raise ValueError("the origin has no dimension attached")
        return self.radius * np.asarray(self.direction)


ORIGIN = PolarPoint(0.0, None)


@dataclass(frozen=True)
class SphericalCap:
    """Closed geodesic ball of the given angular radius around ``center``."""

    center: UnitVector
    angular_radius: float

    def __post_init__(self):
        if not (0.0 < self.angular_radius <= math.pi):
            raise ValueError("angular radius must lie in (0, pi]")

    @property
    def measure_fraction(self) -> float:
        """Share of the sphere's surface measure covered by the cap."""
        return cap_fraction(self.angular_radius, self.center.dim - 1)


def _vec(u) -> np.ndarray:
    return np.asarray(u, dtype=float)


def _check_same_dim(u: np.ndarray, v: np.ndarray):
    if u.shape[-1] != v.shape[-1]:
        raise DimensionError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")


def geodesic_distance(u: ArrayLike, v: ArrayLike) -> float:
    """Great-circle distance arccos(u . v) in radians, in [0, pi]."""
    u, v = _vec(u), _vec(v)
    _check_same_dim(u, v)
    return float(geodesic_distances(u, v))


def polar_decompose(x) -> PolarPoint:
    x = _vec(x).ravel()
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ValueError("the zero vector has no polar decomposition")
    return PolarPoint(r, UnitVector.from_vector(x))


def polar_distance_ratio(x: PolarPoint, y: PolarPoint):
    """||x - y|| divided by |r - rho| + sqrt(r rho) * d(u, v).

    Both quantities are comparable up to absolute constants; the ratio exists
    to measure those constants empirically. Returns :data:`EXACT_ZERO` when
    the two points coincide.
    """
    if x.direction is None or y.direction is None:
        raise ValueError("polar_distance_ratio needs nonzero points")
    num = float(np.linalg.norm(x.cartesian - y.cartesian))
    den = abs(x.radius - y.radius) + math.sqrt(x.radius * y.radius) * geodesic_distance(
        x.direction, y.direction
    )
    if den == 0.0:
        return EXACT_ZERO
    return num / den


def cap_contains(cap: SphericalCap, u: ArrayLike) -> bool:
    return geodesic_distance(cap.center, u) <= cap.angular_radius + CAP_TOL


# --- vectorised helpers ----------------------------------------------------


def row_dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Dot product along the last axis, with broadcasting.

    Every distance in the package goes through this one reduction so that
    fast paths and brute-force oracles agree bit for bit.
    """
    return np.sum(u * v, axis=-1)


def geodesic_distances(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Elementwise geodesic distance between broadcastable arrays of unit rows."""
    return np.arccos(np.clip(row_dot(u, v), -1.0, 1.0))


def normalize_rows(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("cannot normalise a zero row")
    return x / norms


def sphere_directions(count: int, dim: int, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-uniform directions on the unit sphere of R^dim.

    Scrambled Halton points pushed through the normal quantile function and
    normalised, so the result is rotation-invariant in distribution and
    reproducible for a fixed ``seed``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    return normalize_rows(stats.norm.ppf(u))


def cap_fraction(angular_radius: float, d: int) -> float:
    """sigma_d(cap) / sigma_d(S^d) for a cap of the given angular radius.

    Closed forms on the circle and on S^2; adaptive quadrature of
    sin^(d-1) otherwise.
    """
    rho = float(angular_radius)
    if rho <= 0:
        return 0.0
    if rho >= math.pi:
        return 1.0
    if d == 1:
        return rho / math.pi
    if d == 2:
        return (1.0 - math.cos(rho)) / 2.0
    f = lambda t: math.sin(t) ** (d - 1)  # noqa: E731
    num, _ = integrate.quad(f, 0.0, rho, epsabs=1e-12, epsrel=1e-10)
    den, _ = integrate.quad(f, 0.0, math.pi, epsabs=1e-12, epsrel=1e-10)
    return num / den
