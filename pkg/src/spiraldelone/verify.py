"""Finite-prefix certificates for the Delone property of spiral sets.

Sequences of unit vectors are passed either as a :class:`SphericalSource`
or as an ``(N, n)`` array whose row ``k-1`` is u_k. Every statistic is an
exact min/max over its stated finite range; trends across decades are what
separate a healthy sequence from a decaying one.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .geom import CAP_TOL, cap_fraction, geodesic_distances, row_dot, sphere_directions
from .spiral import SphericalSource, SpiralSet

SequenceLike = Union[SphericalSource, np.ndarray]

#: a decade bucket fails when its minimum drops below this share of the median
BUCKET_FLOOR = 0.5


class InsufficientPrefixError(ValueError):
    """The requested window reaches past the available sequence."""


def _as_lookup(u: SequenceLike, k_lo: int, k_hi: int) -> np.ndarray:
    """Rows u_k for k in [k_lo, k_hi]; row 0 is u_{k_lo}."""
    if k_lo < 1:
        raise InsufficientPrefixError(f"window reaches index {k_lo} < 1")
    if isinstance(u, SphericalSource):
        return u.u_array(np.arange(k_lo, k_hi + 1))
    arr = np.asarray(u, dtype=float)
    if k_hi > arr.shape[0]:
        raise InsufficientPrefixError(f"window reaches index {k_hi}, prefix has {arr.shape[0]}")
    return arr[k_lo - 1 : k_hi]


def _dim(u: SequenceLike) -> int:
    return u.dim if isinstance(u, SphericalSource) else np.asarray(u).shape[1]


def window_sizes(ks: np.ndarray, scale: float, n: int) -> np.ndarray:
    """floor(scale * k^(1 - 1/n)) for each k."""
    return np.floor(scale * np.asarray(ks, dtype=float) ** (1.0 - 1.0 / n)).astype(np.int64)


def decade_buckets(k_min: int, k_max: int) -> List[Tuple[int, int]]:
    """Inclusive [lo, hi] ranges split at powers of ten; short tails merge back."""
    edges = [k_min]
    p = 10 ** (int(math.floor(math.log10(k_min))) + 1)
    while p <= k_max:
        edges.append(p)
        p *= 10
    buckets = [(a, b - 1) for a, b in zip(edges[:-1], edges[1:])] + [(edges[-1], k_max)]
    if len(buckets) > 1 and buckets[-1][0] == buckets[-1][1]:
        last = buckets.pop()
        buckets[-1] = (buckets[-1][0], last[1])
    return buckets


# --- reports -----------------------------------------------------------------


@dataclass
class SeparationReport:
    kappa: float
    k_range: Tuple[int, int]
    per_decade_min: List[Tuple[int, int, float]]
    global_min: float
    witness: Tuple[int, int]
    n: int
    passed: bool = False
    failing_buckets: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass
class CoveringReport:
    c: float
    C: float
    k_samples: List[int]
    directions_per_k: int
    seed: int
    max_scaled: List[float]
    worst_defect: float
    passed: bool

    def to_dict(self):
        return asdict(self)


@dataclass
class GapReport:
    h: float
    R_values: List[float]
    min_gaps: List[float]
    max_gaps: List[float]
    min_stat: float
    max_stat: float

    def to_dict(self):
        return asdict(self)


@dataclass
class DensityReport:
    R_values: List[float]
    counts: List[int]
    normalized: List[float]
    expected: List[int]
    cap_discrepancy: float
    caps: int
    seed: int

    def to_dict(self):
        return asdict(self)


# --- separation and covering on the sphere -------------------------------


def separation_statistic(
    u: SequenceLike,
    kappa: float,
    k_min: int,
    k_max: int,
    bucket_floor: float = BUCKET_FLOOR,
) -> SeparationReport:
    """min of k^(1/n) d(u_{k+m}, u_k) over k in [k_min, k_max], 1 <= |m| <= kappa k^(1-1/n).

    Each distance d(u_{j+m}, u_j) is evaluated once and reused for both
    signs of m. The certificate passes when the global minimum is positive
    and no decade bucket drops below ``bucket_floor`` times the median of
    the bucket minima.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    n = _dim(u)
    ks = np.arange(k_min, k_max + 1, dtype=np.int64)
    w = window_sizes(ks, kappa, n)
    w_max = int(w.max())
    lo = int(min(k_min, (ks - w).min()))
    seq = _as_lookup(u, lo, k_max + w_max)
    scale = ks.astype(float) ** (1.0 / n)
    best = np.full(ks.size, np.inf)
    arg_m = np.zeros(ks.size, dtype=np.int64)
    for m in range(1, w_max + 1):
        active = w >= m
        first = int(np.argmax(active))
        kk = ks[first:]
        # D[i] = d(u_{j+m}, u_j) for j = kk[0] - m + i
        base = int(kk[0]) - m
        span = int(kk[-1]) - base + 1
        j0 = base - lo
        D = geodesic_distances(seq[j0 + m : j0 + m + span], seq[j0 : j0 + span])
        fwd = D[m : m + kk.size]
        bwd = D[: kk.size]
        for cand, sign in ((fwd, 1), (bwd, -1)):
            vals = scale[first:] * cand
            better = vals < best[first:]
            best[first:][better] = vals[better]
            arg_m[first:][better] = sign * m
    if w_max == 0:
        raise ValueError("window is empty for every k; increase kappa or k")
    best[w == 0] = np.inf
    buckets = []
    for a, b in decade_buckets(k_min, k_max):
        sel = best[a - k_min : b - k_min + 1]
        buckets.append((a, b, float(sel.min())))
    i = int(np.argmin(best))
    global_min = float(best[i])
    mins = np.array([b[2] for b in buckets])
    floor = bucket_floor * float(np.median(mins))
    failing = [(a, b) for a, b, v in buckets if not v >= floor or v <= 0]
    return SeparationReport(
        kappa=float(kappa),
        k_range=(int(k_min), int(k_max)),
        per_decade_min=buckets,
        global_min=global_min,
        witness=(int(ks[i]), int(arg_m[i])),
        n=n,
        passed=bool(global_min > 0 and not failing),
        failing_buckets=failing,
    )


def covering_profile(
    u: SequenceLike, c: float, k_samples: Sequence[int], n_dirs: int, seed: int = 0
) -> List[float]:
    """For each k, max over directions v of k^(1/n) min_{|m| <= c k^(1-1/n)} d(u_{k+m}, v)."""
    n = _dim(u)
    dirs = sphere_directions(n_dirs, n, seed)
    out = []
    for k in k_samples:
        w = int(window_sizes([k], c, n)[0])
        win = _as_lookup(u, k - w, k + w)
        cosines = np.clip(dirs @ win.T, -1.0, 1.0)
        nearest = np.arccos(cosines.max(axis=1))
        out.append(float(k ** (1.0 / n) * nearest.max()))
    return out


def calibrate_covering(
    u: SequenceLike, c: float, k_cal: int, n_dirs: int, seed: int = 0, margin: float = 1.5
) -> float:
    """C = margin times the largest scaled covering distance seen at k_cal."""
    return margin * covering_profile(u, c, [k_cal], n_dirs, seed)[0]


def covering_check(
    u: SequenceLike,
    c: float,
    C: float,
    k_samples: Sequence[int],
    n_dirs: int,
    seed: int = 0,
) -> CoveringReport:
    """Does every sampled direction lie within C k^(-1/n) of the window around k?"""
    if c <= 0 or C <= 0:
        raise ValueError("c and C must be positive")
    prof = covering_profile(u, c, k_samples, n_dirs, seed)
    worst = max(0.0, max(prof) - C)
    return CoveringReport(
        c=float(c),
        C=float(C),
        k_samples=[int(k) for k in k_samples],
        directions_per_k=int(n_dirs),
        seed=int(seed),
        max_scaled=prof,
        worst_defect=worst,
        passed=worst == 0.0,
    )


# --- Euclidean discreteness and covering ----------------------------------


def _pair_distances(P: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    diff = P[i] - P[j]
    return np.sqrt(row_dot(diff, diff))


def brute_min_distance(P: np.ndarray) -> float:
    """O(N^2) minimum over pairs, using the same arithmetic as the grid path."""
    P = np.asarray(P, dtype=float)
    best = math.inf
    for i in range(P.shape[0] - 1):
        diff = P[i + 1 :] - P[i]
        best = min(best, float(np.sqrt(row_dot(diff, diff)).min()))
    return best


def _cells(P: np.ndarray, size: float) -> Tuple[np.ndarray, np.ndarray]:
    """Integer cell keys (row-major over padded extents) and their strides."""
    origin = P.min(axis=0)
    cell = np.floor((P - origin) / size).astype(np.int64) + 1
    extent = cell.max(axis=0) + 2
    strides = np.cumprod(np.concatenate(([1], extent[:-1])))
    return cell @ strides, strides


def _grid_min(P: np.ndarray, size: float, chunk: int = 1 << 21) -> float:
    keys, strides = _cells(P, size)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    sp = P[order]
    n = P.shape[1]
    offsets = np.array(np.meshgrid(*([[-1, 0, 1]] * n), indexing="ij")).reshape(n, -1).T
    shift = offsets @ strides
    best = math.inf
    for s in shift[shift >= 0]:
        start = np.searchsorted(sk, sk + s, side="left")
        stop = np.searchsorted(sk, sk + s, side="right")
        if s == 0:
            start = np.maximum(start, np.arange(sk.size) + 1)
        counts = np.maximum(stop - start, 0)
        total = int(counts.sum())
        if total == 0:
            continue
        owner = np.repeat(np.arange(sk.size), counts)
        within = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        partner = np.repeat(start, counts) + within
        for a in range(0, total, chunk):
            d = _pair_distances(sp, owner[a : a + chunk], partner[a : a + chunk])
            best = min(best, float(d.min()))
    return best


def min_pairwise_distance(points, sample: int = 256, dense_cell: int = 64, seed: int = 0) -> float:
    """Exact minimum pairwise Euclidean distance via a uniform grid.

    The cell size starts at the exact minimum of a random subsample, which
    bounds the true minimum from above, so every closer pair shares or
    neighbours a cell. While some cell is crowded, its own exact minimum
    shrinks the cell size and the grid is rebuilt. The arithmetic matches
    :func:`brute_min_distance` bit for bit.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] < 2:
        raise ValueError("need at least two points")
    N, n = P.shape
    rng = np.random.default_rng(seed)
    h = brute_min_distance(P[rng.choice(N, size=min(N, sample), replace=False)])
    if h == 0.0:
        return 0.0
    spread = float(np.max(P.max(axis=0) - P.min(axis=0)))
    # cap the key space so cell ids fit in int64; larger cells stay correct
    min_size = spread / (2.0 ** (60.0 / n) - 3.0)
    while True:
        size = max(h, min_size)
        keys, _ = _cells(P, size)
        _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
        top = int(np.argmax(counts))
        if counts[top] <= dense_cell or size > h:
            break
        local = brute_min_distance(P[inverse.ravel() == top])
        if local == 0.0:
            return 0.0
        if local >= 0.5 * h:
            break
        h = local
    return min(h, _grid_min(P, max(h, min_size)))


def covering_radius_estimate(
    points, annulus: Tuple[float, float], samples: int, seed: int = 0
) -> float:
    """Largest distance to the set over quasi-random samples in the annulus.

    Radii are drawn so the samples are uniform in volume; directions come
    from :func:`sphere_directions`. The value bounds the true covering
    radius of the annulus from below.
    """
    P = np.asarray(points, dtype=float)
    lo, hi = map(float, annulus)
    if not 0 <= lo < hi:
        raise ValueError("annulus must satisfy 0 <= R_lo < R_hi")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if hi > float(np.linalg.norm(P, axis=1).max()) + 1e-12:
        raise ValueError("annulus extends past the outermost point")
    n = P.shape[1]
    t = qmc.Halton(d=1, scramble=True, seed=seed + 1).random(samples)[:, 0]
    r = (lo**n + t * (hi**n - lo**n)) ** (1.0 / n)
    x = r[:, None] * sphere_directions(samples, n, seed)
    dist, _ = cKDTree(P).query(x, k=1)
    return float(dist.max())


# --- planar gaps and asymptotic density -----------------------------------


def _sequence_values(x, ks: np.ndarray) -> np.ndarray:
    if callable(x):
        return np.asarray(x(ks), dtype=float)
    arr = np.asarray(x, dtype=float)
    if ks[-1] > arr.size:
        raise InsufficientPrefixError(f"need {ks[-1]} terms, have {arr.size}")
    return arr[ks - 1]


def circular_gaps(values: np.ndarray) -> np.ndarray:
    y = np.sort(np.mod(values, 1.0))
    return np.diff(np.concatenate((y, [y[0] + 1.0])))


def marklof_gaps(
    x: Union[Callable[[np.ndarray], np.ndarray], Sequence[float]],
    h: float,
    R_values: Sequence[float],
) -> GapReport:
    """Min and max circular gaps of {x_k mod 1} for R^2 <= k < (R+h)^2.

    ``x`` is an array (entry k-1 holds x_k) or a vectorised callable of k.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    gs, Gs = [], []
    for R in R_values:
        if R < 1:
            raise ValueError("R must be >= 1")
        ks = np.arange(math.ceil(R * R), math.ceil((R + h) ** 2), dtype=np.int64)
        if ks.size == 0:
            raise ValueError(f"empty window at R={R}")
        gaps = circular_gaps(_sequence_values(x, ks))
        gs.append(float(gaps.min()))
        Gs.append(float(gaps.max()))
    R = np.asarray(R_values, dtype=float)
    return GapReport(
        h=float(h),
        R_values=[float(r) for r in R_values],
        min_gaps=gs,
        max_gaps=Gs,
        min_stat=float(np.min(R * gs)),
        max_stat=float(np.max(R * Gs)),
    )


def cap_discrepancy(directions: np.ndarray, caps: int, seed: int = 0) -> float:
    """max over sampled caps of |empirical share - normalised cap measure|.

    Cap centres are quasi-random directions; angular radii sweep (0, pi)
    along a scrambled Halton sequence.
    """
    U = np.asarray(directions, dtype=float)
    n = U.shape[1]
    centers = sphere_directions(caps, n, seed)
    rho = np.pi * qmc.Halton(d=1, scramble=True, seed=seed + 2).random(caps)[:, 0]
    worst = 0.0
    for w, r in zip(centers, rho):
        share = float(np.mean(geodesic_distances(U, w) <= r + CAP_TOL))
        worst = max(worst, abs(share - cap_fraction(r, n - 1)))
    return worst


def density_scan(spiral: SpiralSet, R_values: Sequence[float], caps: int, seed: int = 0) -> DensityReport:
    """Ball counts #{k : |s_k| <= R} and the cap discrepancy of the directions."""
    n = spiral.n
    R = np.asarray(R_values, dtype=float)
    if np.any(R <= 0):
        raise ValueError("radii must be positive")
    if len(spiral) < np.max(R) ** n:
        raise InsufficientPrefixError("spiral prefix does not reach the largest radius")
    norms = np.sort(spiral.norms)
    counts = np.searchsorted(norms, R * (1.0 + 1e-12), side="right")
    expected = [int(math.floor(r**n + 1e-9)) for r in R]
    return DensityReport(
        R_values=[float(r) for r in R],
        counts=[int(c) for c in counts],
        normalized=[float(c / r**n) for c, r in zip(counts, R)],
        expected=expected,
        cap_discrepancy=cap_discrepancy(spiral.directions, caps, seed),
        caps=int(caps),
        seed=int(seed),
    )
