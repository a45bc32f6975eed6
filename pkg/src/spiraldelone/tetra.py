"""Straight-line flow on the surface of the regular tetrahedron.

The flow starts at vertex B heading into face ABC with velocity
alpha_1 * BC + alpha_2 * BA and is continued across edges by unfolding.
Unfolding the surface into the plane turns the net into a triangular
lattice whose vertices are labelled by parity: in lattice coordinates
(the coefficients along BC and BA) the flow is simply t * alpha, and a
lattice point (i, j) sits on vertex B, C, A or D according to
(i mod 2, j mod 2) = (0, 0), (1, 0), (0, 1), (1, 1).

:class:`TetraFlow` walks face by face in 3D; :func:`fold_point` maps lattice
coordinates straight to the surface. Each one checks the other.

:func:`greedy_select` samples the flow at integer times and keeps a sample
only if, after radial projection to the sphere, it avoids shrinking caps
around the most recent selections.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dioph import AlphaLike, BadVector, _alpha_array, make_bad_vector, torus_norm
from .geom import CAP_TOL, UnitVector, geodesic_distances, normalize_rows
from .spiral import ListSource

VERTEX_TOL = 1e-10
NAMES = "ABCD"
# parity class (i mod 2, j mod 2) of a lattice point -> vertex index into NAMES
PARITY_VERTEX = {(0, 0): 1, (1, 0): 2, (0, 1): 0, (1, 1): 3}
# faces labelled as in the usual net: 1 = ABC, 2 = ABD, 3 = ACD, 4 = BCD
FACES = {1: (0, 1, 2), 2: (0, 1, 3), 3: (0, 2, 3), 4: (1, 2, 3)}


class NearVertexWarning(RuntimeWarning):
    """The flow passed within VERTEX_TOL of a vertex; a tie-break was applied."""


class GreedyCutoffError(RuntimeError):
    """No admissible sample was found within the per-step search budget."""

    def __init__(self, k: int, last_j: int, cutoff: int):
        super().__init__(f"step k={k}: no admissible time in ({last_j}, {last_j + cutoff}]")
        self.k = k
        self.last_j = last_j
        self.cutoff = cutoff


@dataclass(frozen=True)
class Tetrahedron:
    """Regular tetrahedron inscribed in the unit sphere, centroid at 0."""

    vertices: np.ndarray = field(repr=False)

    @property
    def edge_length(self) -> float:
        return float(np.linalg.norm(self.vertices[0] - self.vertices[1]))

    def vertex(self, name: str) -> np.ndarray:
        return self.vertices[NAMES.index(name)]

    def face_vertices(self, label: int) -> np.ndarray:
        return self.vertices[list(FACES[label])]

    def height(self) -> float:
        """Distance from A to the plane of the opposite face BCD."""
        b, c, d = self.vertices[1:]
        normal = np.cross(c - b, d - b)
        return float(abs(np.dot(self.vertices[0] - b, normal)) / np.linalg.norm(normal))

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def standard_tetrahedron() -> Tetrahedron:
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3.0)
    v.setflags(write=False)
    return Tetrahedron(v)


def face_of(vertex_ids: Sequence[int]) -> int:
    key = tuple(sorted(vertex_ids))
    for label, vs in FACES.items():
        if vs == key:
            return label
    raise KeyError(key)


# --- the unfolding plane ----------------------------------------------------

#: images of BC and BA in the unfolding plane, as columns
UNFOLD_FRAME = np.array([[math.sqrt(8.0 / 3.0), math.sqrt(2.0 / 3.0)], [0.0, 4.0 / 3.0]])


def unfold_matrix() -> Tuple[np.ndarray, np.ndarray]:
    """The matrix sending the planar BC, BA to (1, 0), (0, 1), and its inverse."""
    m = np.array([[math.sqrt(3.0 / 8.0), -3.0 / 8.0], [0.0, 3.0 / 4.0]])
    return m, np.linalg.inv(m)


def toral_flow(t: float, alpha: AlphaLike) -> np.ndarray:
    """t * alpha reduced coordinatewise modulo 2 into [-1, 1)^2."""
    z = t * _alpha_array(alpha)
    out = 2.0 * np.mod((z + 1.0) / 2.0, 1.0) - 1.0
    out[out >= 1.0] = -1.0
    return out


def lattice_vertex(point: Sequence[int]) -> int:
    i, j = (int(c) % 2 for c in point)
    return PARITY_VERTEX[(i, j)]


def fold_point(z, tet: Optional[Tetrahedron] = None) -> Tuple[int, np.ndarray]:
    """Surface point and face label for lattice coordinates ``z``."""
    tet = tet or standard_tetrahedron()
    z = np.asarray(z, dtype=float)
    i, j = math.floor(z[0]), math.floor(z[1])
    f1, f2 = z[0] - i, z[1] - j
    if f1 + f2 < 1.0:
        pts = [(i, j), (i + 1, j), (i, j + 1)]
        bary = (1.0 - f1 - f2, f1, f2)
    else:
        pts = [(i + 1, j), (i, j + 1), (i + 1, j + 1)]
        bary = (1.0 - f2, 1.0 - f1, f1 + f2 - 1.0)
    ids = [lattice_vertex(p) for p in pts]
    world = sum(b * tet.vertices[v] for b, v in zip(bary, ids))
    return face_of(ids), world


# --- face walking -----------------------------------------------------------


@dataclass(frozen=True)
class SurfacePoint:
    t: float
    face: int
    local: Tuple[float, float]
    world: Tuple[float, float, float]
    lattice: Tuple[float, float]

    @property
    def unfolded(self) -> np.ndarray:
        """Position in the fixed unfolding plane."""
        return UNFOLD_FRAME @ np.asarray(self.lattice)


@dataclass
class _FaceGeometry:
    inv: np.ndarray
    # inward unit normal to the edge opposite each slot, inside the face plane
    toward: np.ndarray


def _face_geometry(vertices: np.ndarray, ids: Tuple[int, int, int]) -> _FaceGeometry:
    F = vertices[list(ids)].T
    toward = np.empty((3, 3))
    for s in range(3):
        p, q = vertices[ids[(s + 1) % 3]], vertices[ids[(s + 2) % 3]]
        e = (q - p) / np.linalg.norm(q - p)
        w = vertices[ids[s]] - p
        w = w - np.dot(w, e) * e
        toward[s] = w / np.linalg.norm(w)
    return _FaceGeometry(np.linalg.inv(F), toward)


# exit-edge tie-break: edges (v0,v1), (v1,v2), (v2,v0) are opposite slots 2, 0, 1
_EDGE_PRIORITY = (2, 0, 1)


class TetraFlow:
    """Sequential face walker for the flow with direction ``alpha``.

    Call :meth:`advance_to` with non-decreasing times. The walker keeps the
    current face, barycentric position and velocity, and the lattice
    triangle covering the current face in the unfolded net. Speed is reset
    and the position snapped onto the shared edge at every crossing.
    """

    def __init__(self, alpha: AlphaLike, tet: Optional[Tetrahedron] = None, record: bool = False):
        a = _alpha_array(alpha)
        if a.shape != (2,) or np.any(a <= 0):
            raise ValueError("the flow needs two positive direction coefficients")
        self.alpha = a
        self.tet = tet or standard_tetrahedron()
        V = self.tet.vertices
        self._geom = {ids: _face_geometry(V, ids) for ids in FACES.values()}
        self.ids: Tuple[int, int, int] = FACES[1]
        A, B, C = V[0], V[1], V[2]
        velocity = a[0] * (C - B) + a[1] * (A - B)
        self.speed = float(np.linalg.norm(velocity))
        self.t = 0.0
        self.lam = np.array([0.0, 1.0, 0.0])
        self.dlam = self._geom[self.ids].inv @ velocity
        self.lat = np.array([[0, 1], [0, 0], [1, 0]], dtype=np.int64)
        self.crossings = 0
        self.max_jump = 0.0
        self.record = record
        self.trace: List[Tuple[float, int, Tuple[float, float, float]]] = []
        if record:
            self._log()

    @property
    def face(self) -> int:
        return face_of(self.ids)

    def world(self) -> np.ndarray:
        return self.lam @ self.tet.vertices[list(self.ids)]

    def lattice_coords(self) -> np.ndarray:
        return self.lam @ self.lat.astype(float)

    def velocity(self) -> np.ndarray:
        return self.dlam @ self.tet.vertices[list(self.ids)]

    def point(self) -> SurfacePoint:
        # local frame: base at the middle vertex, axes toward the last and first
        return SurfacePoint(
            t=self.t,
            face=self.face,
            local=(float(self.lam[2]), float(self.lam[0])),
            world=tuple(float(c) for c in self.world()),
            lattice=tuple(float(c) for c in self.lattice_coords()),
        )

    def _log(self):
        self.trace.append((self.t, self.face, tuple(float(c) for c in self.world())))

    def advance_to(self, T: float) -> SurfacePoint:
        if T < self.t:
            raise ValueError("the walker only moves forward in time")
        while True:
            neg = self.dlam < 0
            hit = np.full(3, np.inf)
            hit[neg] = -self.lam[neg] / self.dlam[neg]
            s = float(hit.min())
            if self.t + s > T:
                self.lam = self.lam + (T - self.t) * self.dlam
                self.t = float(T)
                return self.point()
            exits = [i for i in _EDGE_PRIORITY if hit[i] == s]
            self._cross(exits[0], s)

    def _cross(self, slot: int, s: float):
        geom = self._geom[self.ids]
        before = self.lam + s * self.dlam
        world_before = before @ self.tet.vertices[list(self.ids)]
        others = [i for i in range(3) if i != slot]
        if min(before[i] for i in others) * self.tet.edge_length < VERTEX_TOL:
            warnings.warn(f"flow passes within {VERTEX_TOL} of a vertex at t={self.t + s}", NearVertexWarning)
        V = self.velocity()
        b = float(np.dot(V, geom.toward[slot]))
        along = V - b * geom.toward[slot]
        new_vertex = ({0, 1, 2, 3} - set(self.ids)).pop()
        new_lat = self.lat[others[0]] + self.lat[others[1]] - self.lat[slot]
        kept = {self.ids[i]: (before[i], self.lat[i]) for i in others}
        kept[new_vertex] = (0.0, new_lat)
        ids = tuple(sorted(kept))
        lam = np.array([max(kept[v][0], 0.0) for v in ids])
        lam /= lam.sum()
        new_slot = ids.index(new_vertex)
        new_geom = self._geom[ids]
        V_new = along - b * new_geom.toward[new_slot]
        V_new *= self.speed / np.linalg.norm(V_new)
        self.ids = ids
        self.lam = lam
        self.lat = np.array([kept[v][1] for v in ids], dtype=np.int64)
        self.dlam = new_geom.inv @ V_new
        self.dlam -= self.dlam.mean()
        self.t += s
        self.crossings += 1
        self.max_jump = max(self.max_jump, float(np.linalg.norm(self.world() - world_before)))
        if self.record:
            self._log()


def tetra_flow(t: float, alpha: AlphaLike, tet: Optional[Tetrahedron] = None) -> SurfacePoint:
    if t < 0:
        raise ValueError("t must be >= 0")
    return TetraFlow(alpha, tet).advance_to(t)


def fold_defect(x1, x2) -> float:
    """Distance on the doubled torus, identified up to the sign symmetry."""
    x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
    return float(min(torus_norm((x1 - x2) / 2.0), torus_norm((x1 + x2) / 2.0)))


def fold_consistency(
    t: float, alpha: AlphaLike, tet: Optional[Tetrahedron] = None, flow: Optional["TetraFlow"] = None
) -> float:
    """Disagreement between the toral reduction and the face walker at time t.

    Pass a running ``flow`` to check many increasing times without
    re-walking from zero.
    """
    p = flow.advance_to(t) if flow is not None else tetra_flow(t, alpha, tet)
    return fold_defect(toral_flow(t, alpha), toral_reduce(p.lattice))


def toral_reduce(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = 2.0 * np.mod((z + 1.0) / 2.0, 1.0) - 1.0
    out[out >= 1.0] = -1.0
    return out


def radial_project(x) -> UnitVector:
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("cannot project the origin")
    return UnitVector.from_vector(x)


# --- greedy cap exclusion ----------------------------------------------------


@dataclass(frozen=True)
class GreedyConfig:
    alpha: BadVector = field(default_factory=lambda: make_bad_vector(2))
    gamma: float = 0.1
    k_target: int = 2000
    p_cutoff: int = 10**6

    def __post_init__(self):
        if self.alpha.d != 2 or min(self.alpha.alpha) <= 0:
            raise ValueError("the flow needs a 2-dimensional vector with positive entries")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.k_target < 1 or self.p_cutoff < 1:
            raise ValueError("k_target and p_cutoff must be >= 1")

    def to_dict(self) -> Dict[str, object]:
        return {
            "alpha": list(self.alpha.alpha),
            "label": self.alpha.label,
            "min_poly": list(self.alpha.min_poly),
            "gamma": self.gamma,
            "k_target": self.k_target,
            "p_cutoff": self.p_cutoff,
        }


@dataclass
class GreedyState:
    """Selected integer times j_1 < j_2 < ... and their unit vectors u_k."""

    j: List[int] = field(default_factory=list)
    u: List[Tuple[float, float, float]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.j)

    @property
    def vectors(self) -> np.ndarray:
        return np.asarray(self.u, dtype=float).reshape(-1, 3)

    def to_json(self, cfg: Optional[GreedyConfig] = None) -> str:
        doc = {"j": self.j, "u": [list(v) for v in self.u]}
        if cfg is not None:
            doc["config"] = cfg.to_dict()
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GreedyState":
        doc = json.loads(text)
        return cls(j=[int(x) for x in doc["j"]], u=[tuple(map(float, v)) for v in doc["u"]])


def exclusion_window(k: int) -> int:
    """Largest m with m < k^(2/3), i.e. m^3 < k^2; zero for k = 1."""
    m = max(int(round(k ** (2.0 / 3.0))) + 1, 0)
    while m > 0 and m**3 >= k * k:
        m -= 1
    return m


def greedy_select(
    cfg: GreedyConfig,
    state: Optional[GreedyState] = None,
    tet: Optional[Tetrahedron] = None,
    flow: Optional[TetraFlow] = None,
) -> GreedyState:
    """Run (or resume) the cap-exclusion selection up to ``cfg.k_target``.

    For k >= 2 the candidate times p > j_{k-1} are tried in order; p is kept
    when its projected flow point lies outside every cap of radius
    gamma k^(-1/3) around u_{k-m}, 1 <= m < k^(2/3). When resuming, the
    walker replays the same integer stops, so results are bitwise identical
    to an uninterrupted run.
    """
    flow = flow or TetraFlow(cfg.alpha.array, tet)
    state = state or GreedyState()
    if flow.t > 0 and (not state.j or flow.t != state.j[-1]):
        raise ValueError("a supplied walker must sit at the last selected time")
    if state.j and flow.t == 0:
        for p in range(1, state.j[-1] + 1):
            flow.advance_to(p)

    def sample(p: int) -> np.ndarray:
        w = np.asarray(flow.advance_to(p).world)
        return w / np.linalg.norm(w)

    if not state.j:
        state.j.append(1)
        state.u.append(tuple(sample(1)))
    U = np.empty((cfg.k_target, 3))
    U[: state.k] = state.vectors[: cfg.k_target]
    for k in range(state.k + 1, cfg.k_target + 1):
        m_max = exclusion_window(k)
        recent = U[k - 1 - m_max : k - 1]
        radius = cfg.gamma * k ** (-1.0 / 3.0)
        last = state.j[-1]
        for p in range(last + 1, last + cfg.p_cutoff + 1):
            x = sample(p)
            if geodesic_distances(recent, x).min() > radius + CAP_TOL:
                break
        else:
            raise GreedyCutoffError(k, last, cfg.p_cutoff)
        state.j.append(p)
        state.u.append(tuple(float(c) for c in x))
        U[k - 1] = x
    return state


def tetra_source(cfg: GreedyConfig, state: Optional[GreedyState] = None) -> ListSource:
    """The selected directions as a spherical source for spiral generation."""
    state = greedy_select(cfg, state)
    meta = tuple(sorted(cfg.to_dict().items(), key=lambda kv: kv[0]))
    meta = tuple((k, tuple(v) if isinstance(v, list) else v) for k, v in meta)
    return ListSource(normalize_rows(state.vectors[: cfg.k_target]), kind="tetra", meta=meta)


def write_flow_trace(path, trace: Sequence[Tuple[float, int, Sequence[float]]]):
    """CSV with columns t, face, x, y, z."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["t", "face", "x", "y", "z"])
        for t, face, w in trace:
            out.writerow([f"{t:.17g}", face] + [f"{c:.17g}" for c in w])
