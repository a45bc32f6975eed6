"""Lifting toral sequences to the sphere.

A point of [0, 1]^d is recentred to the cube [-1, 1]^d, squeezed onto the
closed unit ball, and sent to one hemisphere of S^d by a stereographic
chart. Even and odd indices use opposite hemispheres; the two maps agree
on the boundary of the cube, where both land on the equator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dioph import AlphaLike, BadVector, _alpha_array
from .geom import UnitVector

BOX_TOL = 1e-12


@dataclass(frozen=True)
class ToralPoint:
    """Coordinates on the unit torus [0,1)^d or on the doubled torus [-1,1)^d."""

    coords: Tuple[float, ...]
    convention: str = "unit"

    def __post_init__(self):
        lo, hi = {"unit": (0.0, 1.0), "double": (-1.0, 1.0)}[self.convention]
        x = np.asarray(self.coords, dtype=float)
        if np.any(x < lo) or np.any(x >= hi):
            raise ValueError(f"{self.coords} not inside [{lo}, {hi})^d")
        object.__setattr__(self, "coords", tuple(float(c) for c in x))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def cube_contraction(x) -> np.ndarray:
    """Map [-1, 1]^m onto the closed unit ball, rescaling each ray.

    x = r u with u a unit vector goes to r ||u||_inf u, so the cube's
    boundary lands on the unit sphere and the origin stays put. Accepts a
    single vector or an array of row vectors.
    """
    x = np.asarray(x, dtype=float)
    sup = np.max(np.abs(x), axis=-1, keepdims=True)
    if np.any(sup > 1.0 + BOX_TOL):
        raise ValueError("input lies outside the cube [-1, 1]^m")
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    safe = np.where(norm == 0.0, 1.0, norm)
    return np.where(norm == 0.0, 0.0, x * (sup / safe))


def stereo_north(x) -> np.ndarray:
    """Inverse stereographic chart from the north pole: R^d -> S^d minus N."""
    x = np.asarray(x, dtype=float)
    sq = np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate((2.0 * x / (1.0 + sq), (sq - 1.0) / (1.0 + sq)), axis=-1)


def stereo_south(x) -> np.ndarray:
    """Inverse stereographic chart from the south pole: R^d -> S^d minus S."""
    y = stereo_north(x)
    y[..., -1] *= -1.0
    return y


def _check_box(x: np.ndarray):
    if np.any(x < -BOX_TOL) or np.any(x > 1.0 + BOX_TOL):
        raise ValueError("toral input must lie in [0, 1]^d")


def tau_array(branch: int, x) -> np.ndarray:
    """Vectorised hemisphere maps; ``x`` is one point or rows in [0, 1]^d.

    Branch 1 lands in the southern hemisphere, branch 2 in the northern.
    """
    x = np.asarray(x, dtype=float)
    _check_box(x)
    y = cube_contraction(np.clip(2.0 * x - 1.0, -1.0, 1.0))
    if branch == 1:
        return stereo_north(y)
    if branch == 2:
        return stereo_south(y)
    raise ValueError("branch must be 1 or 2")


def tau(branch: int, x) -> UnitVector:
    return UnitVector(tuple(tau_array(branch, np.ravel(np.asarray(x, dtype=float)))))


@dataclass(frozen=True)
class LiftedSequence:
    """u_k = lift of {k alpha}, southern hemisphere for even k, northern for odd."""

    alpha: BadVector

    @property
    def d(self) -> int:
        return self.alpha.d

    @property
    def n(self) -> int:
        return self.alpha.d + 1

    def toral(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        return toral_points(self.alpha, ks)

    def u_array(self, ks) -> np.ndarray:
        ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
        if np.any(ks < 1):
            raise ValueError("indices start at 1")
        x = self.toral(ks)
        out = tau_array(2, x)
        even = ks % 2 == 0
        out[even] = tau_array(1, x[even])
        return out


def toral_points(alpha: AlphaLike, ks) -> np.ndarray:
    """Rows {k alpha} in [0, 1)^d, one per index."""
    a = _alpha_array(alpha)
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64)).astype(float)
    x = np.mod(ks[:, None] * a[None, :], 1.0)
    x[x >= 1.0] = 0.0
    return x


def lifted_u(k: int, seq: LiftedSequence) -> UnitVector:
    if k < 1:
        raise ValueError("indices start at 1")
    return UnitVector(tuple(seq.u_array([k])[0]))


# --- the circle as a lift ---------------------------------------------------


def circle_point(t) -> np.ndarray:
    """e(t) = (cos 2 pi t, sin 2 pi t)."""
    t = np.asarray(t, dtype=float)
    return np.stack((np.cos(2.0 * np.pi * t), np.sin(2.0 * np.pi * t)), axis=-1)


def circle_tau(branch: int, x: float) -> np.ndarray:
    """The two circle charts: e(x/2) on branch 1, e(-x/2) on branch 2."""
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    return circle_point(x / 2.0 if branch == 1 else -x / 2.0)


def circle_lift_decompose(y: float) -> Tuple[float, int]:
    """Write e(y) as a chart image: returns (x in [0, 1], branch)."""
    f = y - math.floor(y)
    if f >= 1.0:
        f = 0.0
    if f < 0.5:
        return 2.0 * f, 1
    return 2.0 - 2.0 * f, 2
