"""Badly approximable vectors and the quantities attached to them.

Everything here is exhaustive and exact up to floating point: best
approximants by a full scan over q, linear-form statistics by full
enumeration, dual-lattice minima by enumeration inside a Minkowski radius.
Toral dispersion is exact on the circle and grid-sampled in dimension 2 and 3.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree

MAX_DIM = 8
ROOT_TOL = 1e-12
ENUM_BUDGET = 10**7
DEFAULT_CHUNK = 1 << 20


class EnumerationBudgetError(RuntimeError):
    """An exhaustive search would exceed its configured size budget."""


class SearchCapError(RuntimeError):
    """A prefix search ran past its cap without meeting its target."""


@dataclass(frozen=True)
class BadVector:
    """alpha = (theta, theta^2, ..., theta^d) for a real algebraic integer theta.

    ``min_poly`` holds the integer coefficients of theta's minimal
    polynomial, highest degree first. The coordinates are stored unreduced;
    reduce with :attr:`frac` when working on the torus.
    """

    d: int
    alpha: Tuple[float, ...]
    min_poly: Tuple[int, ...]
    theta: float
    label: str
    checked_b_max: int = 0
    transference_value: float = float("nan")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float)

    @property
    def frac(self) -> np.ndarray:
        return np.mod(self.array, 1.0)

    @property
    def poly_residual(self) -> float:
        return abs(float(np.polyval(self.min_poly, self.theta)))

    def scaled(self, factor: int) -> np.ndarray:
        """Coordinates of ``factor * alpha`` (e.g. 2 alpha for parity splits)."""
        return factor * self.array


@dataclass(frozen=True)
class BestApproximant:
    q: int
    p: Tuple[int, ...]
    err: float


@dataclass(frozen=True)
class ApproximantLattice:
    """The lattice {j p/q + m : j in Z, m in Z^d}.

    ``int_basis`` rows span the integer lattice q * L; ``basis`` is the same
    divided by q.
    """

    q: int
    p: Tuple[int, ...]
    int_basis: Tuple[Tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def basis(self) -> np.ndarray:
        return np.asarray(self.int_basis, dtype=float) / self.q

    @property
    def index(self) -> int:
        """[L : Z^d], the order of p/q in (Q/Z)^d."""
        return self.q // math.gcd(self.q, *self.p)

    @property
    def determinant(self) -> float:
        return 1.0 / self.index

    def dual_contains(self, v) -> bool:
        return sum(int(a) * int(b) for a, b in zip(v, self.p)) % self.q == 0


@dataclass(frozen=True)
class DensityCertificate:
    epsilon: float
    M: int
    achieved_dispersion: float
    q_max: int
    dim: int = 1
    parity: Optional[str] = None
    resolution: float = 0.0

    @property
    def empirical_K(self) -> float:
        """M * eps^d; bounded in eps for a badly approximable vector."""
        return self.M * self.epsilon**self.dim


AlphaLike = Union[BadVector, Sequence[float], np.ndarray, float]


def _alpha_array(alpha: AlphaLike) -> np.ndarray:
    if isinstance(alpha, BadVector):
        return alpha.array
    return np.atleast_1d(np.asarray(alpha, dtype=float))


def dist_to_int(x) -> np.ndarray:
    """||x|| componentwise: distance to the nearest integer (ties to even)."""
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.rint(x))


def torus_norm(x) -> np.ndarray:
    """Sup-norm distance to Z^d along the last axis."""
    return np.max(dist_to_int(x), axis=-1)


# --- construction ----------------------------------------------------------


def _generator_polynomial(d: int) -> Tuple[Tuple[int, ...], float, str]:
    if d == 1:
        return (1, -1, -1), (1.0 + math.sqrt(5.0)) / 2.0, "golden"
    if d == 2:
        return (1, 1, -2, -1), 2.0 * math.cos(2.0 * math.pi / 7.0), "cos2pi7"
    coeffs = (1,) + (0,) * (d - 1) + (-1, -1)
    theta = optimize.brentq(lambda x: np.polyval(coeffs, x), 1.0, 2.0, xtol=1e-15, rtol=1e-15)
    return coeffs, theta, f"selmer{d + 1}"


def _transference_b_max(d: int, budget: int = ENUM_BUDGET) -> int:
    b = int((budget ** (1.0 / d) - 1) // 2)
    return max(1, min(50, b))


def _certify(d: int, coeffs, theta: float, label: str) -> BadVector:
    alpha = tuple(theta**j for j in range(1, d + 1))
    residual = abs(float(np.polyval(coeffs, theta)))
    if residual > ROOT_TOL:
        raise ValueError(f"theta={theta!r} leaves polynomial residual {residual:.3g}")
    b_max = _transference_b_max(d)
    value = transference_statistic(alpha, b_max)
    if not value > 0:
        raise ValueError(f"{label}: linear-form statistic vanishes at b_max={b_max}")
    return BadVector(
        d=d,
        alpha=alpha,
        min_poly=tuple(int(c) for c in coeffs),
        theta=float(theta),
        label=label,
        checked_b_max=b_max,
        transference_value=value,
    )


@functools.lru_cache(maxsize=None)
def make_bad_vector(d: int) -> BadVector:
    """Power-basis vector (theta, ..., theta^d) of a degree d+1 algebraic integer.

    d=1 uses the golden ratio, d=2 uses 2cos(2pi/7), and d>=3 the real root in
    (1, 2) of x^(d+1) - x - 1. The badness is checked numerically through the
    linear-form statistic, not proved.
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= MAX_DIM:
        raise ValueError(f"d must be an integer in [1, {MAX_DIM}], got {d!r}")
    coeffs, theta, label = _generator_polynomial(int(d))
    return _certify(int(d), coeffs, theta, label)


def bad_vector_from_polynomial(
    coeffs: Sequence[int], bracket: Tuple[float, float], label: str = "custom"
) -> BadVector:
    """Power-basis vector of the root of ``coeffs`` inside ``bracket``."""
    coeffs = tuple(int(c) for c in coeffs)
    d = len(coeffs) - 2
    if not 1 <= d <= MAX_DIM:
        raise ValueError("polynomial degree must lie in [2, 9]")
    lo, hi = bracket
    theta = optimize.brentq(lambda x: np.polyval(coeffs, x), lo, hi, xtol=1e-15, rtol=1e-15)
    return _certify(d, coeffs, theta, label)


# --- approximation statistics ---------------------------------------------


def _multiples_err(alpha: np.ndarray, q: np.ndarray) -> np.ndarray:
    return torus_norm(q[:, None] * alpha[None, :])


def badness_statistic(alpha: AlphaLike, q_max: int) -> float:
    """min over 1 <= q <= q_max of q^(1/d) * ||q alpha||_{Z^d}."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    a = _alpha_array(alpha)
    d = a.size
    best = math.inf
    for start in range(1, q_max + 1, DEFAULT_CHUNK):
        q = np.arange(start, min(q_max, start + DEFAULT_CHUNK - 1) + 1, dtype=float)
        best = min(best, float(np.min(q ** (1.0 / d) * _multiples_err(a, q))))
    return best


def _enumerate_box(d: int, b_max: int, chunk: int = DEFAULT_CHUNK):
    side = 2 * b_max + 1
    total = side**d
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.empty((idx.size, d), dtype=np.int64)
        for j in range(d):
            idx, r = np.divmod(idx, side)
            digits[:, j] = r - b_max
        yield digits


def transference_statistic(alpha: AlphaLike, b_max: int, budget: int = ENUM_BUDGET) -> float:
    """min over nonzero b in [-b_max, b_max]^d of ||alpha . b|| * ||b||_inf^d."""
    if b_max < 1:
        raise ValueError("b_max must be >= 1")
    a = _alpha_array(alpha)
    d = a.size
    size = (2 * b_max + 1) ** d - 1
    if size > budget:
        raise EnumerationBudgetError(f"{size} vectors exceeds budget {budget}")
    best = math.inf
    for b in _enumerate_box(d, b_max):
        sup = np.max(np.abs(b), axis=1)
        keep = sup > 0
        b, sup = b[keep], sup[keep].astype(float)
        vals = dist_to_int(b @ a) * sup**d
        if vals.size:
            best = min(best, float(vals.min()))
    return best


def best_approximants(alpha: AlphaLike, q_max: int) -> List[BestApproximant]:
    """All q <= q_max that strictly improve on every smaller q's ||q alpha||."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    a = _alpha_array(alpha)
    out: List[BestApproximant] = []
    record = math.inf
    for start in range(1, q_max + 1, DEFAULT_CHUNK):
        q = np.arange(start, min(q_max, start + DEFAULT_CHUNK - 1) + 1, dtype=np.int64)
        err = _multiples_err(a, q.astype(float))
        running = np.minimum.accumulate(err)
        prev = np.concatenate(([record], running[:-1]))
        for i in np.flatnonzero(err < prev):
            qi = int(q[i])
            p = tuple(int(x) for x in np.rint(qi * a))
            out.append(BestApproximant(q=qi, p=p, err=float(err[i])))
        record = min(record, float(running[-1]))
    return out


# --- dispersion -------------------------------------------------------------


def _wrap01(x: np.ndarray) -> np.ndarray:
    x = np.mod(x, 1.0)
    x[x >= 1.0] = 0.0
    return x


def default_resolution(d: int) -> float:
    return {2: 1.0 / 512, 3: 1.0 / 128}.get(d, 0.0)


def torus_dispersion(points, resolution: Optional[float] = None, return_resolution: bool = False):
    """Sup-norm covering radius of ``points`` on the unit torus.

    On the circle the value is exact (half the largest circular gap). In
    dimension 2 and 3 it is the maximum over a regular grid of step
    ``resolution`` of the toral sup-distance to the nearest point; this
    is a lower bound on the true value, within ``resolution / 2`` of it.
    With ``return_resolution`` the pair ``(value, resolution)`` is returned,
    resolution 0 meaning exact.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("dispersion of an empty set is undefined")
    if pts.ndim == 1:
        pts = pts[:, None]
    d = pts.shape[1]
    pts = _wrap01(pts.copy())
    if d == 1:
        x = np.sort(pts[:, 0])
        gaps = np.diff(np.concatenate((x, [x[0] + 1.0])))
        value, step = float(gaps.max()) / 2.0, 0.0
    elif d in (2, 3):
        step = resolution or default_resolution(d)
        n_axis = int(round(1.0 / step))
        tree = cKDTree(pts, boxsize=1.0)
        axis = np.arange(n_axis) * step
        value = 0.0
        # slabs along the first axis keep memory flat
        rest = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
        for x0 in axis:
            grid = np.column_stack((np.full(len(rest), x0), rest))
            dist, _ = tree.query(grid, k=1, p=np.inf)
            value = max(value, float(dist.max()))
    else:
        raise ValueError("torus_dispersion supports d <= 3")
    return (value, step) if return_resolution else value


def _parity_q(j: np.ndarray, parity: Optional[str]) -> np.ndarray:
    if parity is None:
        return j
    if parity == "even":
        return 2 * j
    if parity == "odd":
        return 2 * j - 1
    raise ValueError("parity must be None, 'even' or 'odd'")


def epsilon_dense_bound(
    alpha: AlphaLike,
    epsilon: float,
    parity: Optional[str] = None,
    max_count: int = 1 << 22,
    resolution: Optional[float] = None,
) -> DensityCertificate:
    """Smallest M such that the first M admissible multiples are eps-dense.

    Admissible multiples are q alpha for q = 1, 2, ... (``parity=None``), or
    for even / odd q only. ``M`` counts points used; ``q_max`` is the largest
    multiplier among them. Dispersion is monotone under adding points, so an
    exponential bracket followed by bisection finds the minimum.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    a = _alpha_array(alpha)
    d = a.size

    def disp(m: int) -> float:
        q = _parity_q(np.arange(1, m + 1, dtype=np.int64), parity).astype(float)
        return torus_dispersion(q[:, None] * a[None, :], resolution=resolution)

    lo = 0
    hi = max(1, int(math.ceil((2 * epsilon) ** -d)))
    while disp(hi) > epsilon:
        lo = hi
        hi *= 2
        if hi > max_count:
            raise SearchCapError(f"no eps={epsilon} dense prefix within {max_count} points")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if disp(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    step = 0.0 if d == 1 else (resolution or default_resolution(d))
    return DensityCertificate(
        epsilon=float(epsilon),
        M=hi,
        achieved_dispersion=disp(hi),
        q_max=int(_parity_q(np.array([hi]), parity)[0]),
        parity=parity,
        resolution=step,
        dim=d,
    )


# --- lattices attached to best approximants --------------------------------


def _hermite_rows(gens: List[List[int]], d: int) -> List[List[int]]:
    """Row-style Hermite reduction of integer generators to a basis."""
    rows = [list(r) for r in gens]
    basis = []
    for col in range(d):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            pivot = active[0]
            reduced = [pivot]
            for r in active[1:]:
                f = r[col] // pivot[col]
                r = [x - f * y for x, y in zip(r, pivot)]
                (reduced if r[col] != 0 else rest).append(r)
            active = reduced
        if not active:
            raise ValueError("generators do not span a full-rank lattice")
        piv = active[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = rest
    return basis


def approximant_lattice(best: BestApproximant) -> ApproximantLattice:
    d = len(best.p)
    gens = [list(best.p)] + [[best.q if i == j else 0 for j in range(d)] for i in range(d)]
    rows = _hermite_rows(gens, d)
    return ApproximantLattice(q=best.q, p=best.p, int_basis=tuple(tuple(r) for r in rows))


def dual_shortest_vector(lat: ApproximantLattice, budget: int = ENUM_BUDGET) -> Tuple[float, Tuple[int, ...]]:
    """mu_1 of the dual {v in Z^d : v . p = 0 mod q}, with a witness.

    The dual has determinant [L : Z^d], so Minkowski's theorem bounds its
    shortest vector by sqrt(d) * index^(1/d); every integer vector inside
    that radius is checked.
    """
    d = lat.d
    radius = math.sqrt(d) * lat.index ** (1.0 / d)
    r_int = int(math.floor(radius + 1e-9))
    if (2 * r_int + 1) ** d > budget:
        raise EnumerationBudgetError(f"dual enumeration radius {r_int} exceeds budget")
    p = np.asarray(lat.p, dtype=np.int64)
    best_sq, best_v = math.inf, None
    for v in _enumerate_box(d, r_int):
        sq = np.sum(v * v, axis=1)
        ok = (sq > 0) & ((v @ p) % lat.q == 0) & (sq <= radius * radius + 1e-9)
        if np.any(ok):
            i = np.flatnonzero(ok)[np.argmin(sq[ok])]
            if sq[i] < best_sq:
                best_sq, best_v = int(sq[i]), tuple(int(x) for x in v[i])
    if best_v is None:
        raise RuntimeError("Minkowski radius enumeration found no dual vector")
    return math.sqrt(best_sq), best_v


def lattice_points_mod1(lat: ApproximantLattice) -> np.ndarray:
    j = np.arange(lat.index, dtype=np.int64)[:, None]
    return _wrap01((j * np.asarray(lat.p, dtype=np.int64) % lat.q).astype(float) / lat.q)


def covering_radius(lat: ApproximantLattice, resolution: Optional[float] = None) -> float:
    """Euclidean covering radius; exact for d=1, grid maximum for d=2,3."""
    if lat.d == 1:
        return 0.5 / lat.index
    if lat.d > 3:
        raise ValueError("covering radius supported for d <= 3")
    step = resolution or {2: 1.0 / 256, 3: 1.0 / 64}[lat.d]
    tree = cKDTree(lattice_points_mod1(lat), boxsize=1.0)
    axis = np.arange(int(round(1.0 / step))) * step
    grid = np.stack(np.meshgrid(*([axis] * lat.d), indexing="ij"), axis=-1).reshape(-1, lat.d)
    dist, _ = tree.query(grid, k=1)
    return float(dist.max())


def approximant_lattice_stats(
    alpha: AlphaLike, nu_index: int, resolution: Optional[float] = None
) -> Tuple[float, float]:
    """(mu_1 of the dual lattice, covering radius) for the nu-th best approximant.

    ``nu_index`` is 1-based. Their product is at most d/2.
    """
    a = _alpha_array(alpha)
    if a.size > 3:
        raise ValueError("lattice statistics are supported for d <= 3")
    if nu_index < 1:
        raise ValueError("nu_index is 1-based")
    q_max = 1024
    while True:
        bas = best_approximants(a, q_max)
        if len(bas) >= nu_index:
            break
        q_max *= 8
        if q_max > 1 << 26:
            raise SearchCapError("not enough best approximants found")
    lat = approximant_lattice(bas[nu_index - 1])
    mu1, _ = dual_shortest_vector(lat)
    return mu1, covering_radius(lat, resolution)
