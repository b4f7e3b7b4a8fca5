"""Planar polygonal domains: good directions, the inward field and the contraction map."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    ConstructionError,
    ContradictionError,
    FieldConstructionError,
    InvalidInputError,
    NotApplicableError,
)

Vec = tuple[float, float]


def signed_area(ring: Sequence[Sequence[float]]) -> float:
    pts = np.asarray(ring, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def points_in_ring(P: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Crossing-number test for many points against one closed ring."""
    x1, y1 = ring[:, 0][:, None], ring[:, 1][:, None]
    x2, y2 = np.roll(ring[:, 0], -1)[:, None], np.roll(ring[:, 1], -1)[:, None]
    px, py = P[:, 0][None, :], P[:, 1][None, :]
    straddle = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    hits = straddle & (px < xcross)
    return (hits.sum(axis=0) % 2) == 1


def segment_distances(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distances from points P (n,2) to segments [A_i, B_i]: an (n, m) array."""
    E = B - A
    ee = np.maximum((E * E).sum(axis=1), 1e-300)
    s = ((P[:, None, :] - A[None]) * E[None]).sum(axis=2) / ee[None]
    s = np.clip(s, 0.0, 1.0)
    foot = A[None] + s[:, :, None] * E[None]
    return np.linalg.norm(P[:, None, :] - foot, axis=2)


@dataclass
class PolygonalDomain:
    """Interior of a counterclockwise outer ring minus clockwise hole rings.

    Rings with the opposite orientation are reversed on construction.
    """

    outer: list[Vec]
    holes: list[list[Vec]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.outer) < 3:
            raise InvalidInputError("outer ring needs at least three vertices")
        self.outer = [tuple(map(float, p)) for p in self.outer]
        if signed_area(self.outer) < 0:
            self.outer.reverse()
        holes = []
        for h in self.holes:
            ring = [tuple(map(float, p)) for p in h]
            if len(ring) < 3:
                raise InvalidInputError("hole ring needs at least three vertices")
            if signed_area(ring) > 0:
                ring.reverse()
            holes.append(ring)
        self.holes = holes
        self.rings = [np.asarray(self.outer)] + [np.asarray(h) for h in self.holes]
        A, B, ring_id = [], [], []
        for r, ring in enumerate(self.rings):
            A.append(ring)
            B.append(np.roll(ring, -1, axis=0))
            ring_id += [r] * len(ring)
        self.A = np.vstack(A)
        self.B = np.vstack(B)
        self.ring_id = np.asarray(ring_id)
        E = self.B - self.A
        lengths = np.linalg.norm(E, axis=1)
        if np.any(lengths == 0):
            raise InvalidInputError("repeated consecutive vertices")
        # left normal: into the material for a ccw outer ring and cw holes
        self.normals = np.stack([-E[:, 1], E[:, 0]], axis=1) / lengths[:, None]
        self.lengths = lengths

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> PolygonalDomain:
        return cls([tuple(p) for p in data["outer"]], [[tuple(p) for p in h] for h in data.get("holes", [])])

    def to_json(self) -> dict[str, Any]:
        return {"outer": [list(p) for p in self.outer], "holes": [[list(p) for p in h] for h in self.holes]}

    @property
    def n_edges(self) -> int:
        return len(self.A)

    def edge_neighbours(self, e: int) -> tuple[int, int]:
        """Indices of the previous and next edge on the same ring."""
        r = self.ring_id[e]
        idx = np.flatnonzero(self.ring_id == r)
        start, n = int(idx[0]), len(idx)
        i = e - start
        return start + (i - 1) % n, start + (i + 1) % n

    def boundary_distance(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return segment_distances(P, self.A, self.B).min(axis=1)

    def contains(self, P: np.ndarray, closed: bool = False, tol: float = 1e-12) -> np.ndarray:
        """Membership in the open domain, or in its closure when closed=True."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        inside = points_in_ring(P, self.rings[0])
        for ring in self.rings[1:]:
            inside &= ~points_in_ring(P, ring)
        dist = self.boundary_distance(P)
        if closed:
            return inside | (dist <= tol)
        return inside & (dist > tol)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.rings[0].min(axis=0), self.rings[0].max(axis=0)

    def sample_boundary(self, n: int, rng: np.random.Generator) -> np.ndarray:
        cum = np.concatenate([[0.0], np.cumsum(self.lengths)])
        s = rng.uniform(0.0, cum[-1], size=n)
        e = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, self.n_edges - 1)
        lam = (s - cum[e]) / self.lengths[e]
        return self.A[e] + lam[:, None] * (self.B[e] - self.A[e])

    def sample_closure(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.bbox()
        out = []
        count = 0
        while count < n:
            P = rng.uniform(lo, hi, size=(2 * n, 2))
            P = P[self.contains(P, closed=True)]
            out.append(P)
            count += len(P)
        return np.vstack(out)[:n]


def _clip_to_ball(a: np.ndarray, b: np.ndarray, x0: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray] | None:
    d = b - a
    f = a - x0
    A = float(d @ d)
    B = 2.0 * float(f @ d)
    C = float(f @ f) - r * r
    disc = B * B - 4 * A * C
    if disc <= 0:
        return None
    sq = math.sqrt(disc)
    s0 = max((-B - sq) / (2 * A), 0.0)
    s1 = min((-B + sq) / (2 * A), 1.0)
    if s1 <= s0:
        return None
    return a + s0 * d, a + s1 * d


def is_good_direction(omega: PolygonalDomain, x0: Sequence[float], v: Sequence[float], delta: float) -> bool:
    """Whether ∂Ω ∩ B(x0, δ) is a graph over v⊥ with Ω on the +v side.

    Exact edge arithmetic: every boundary piece in the ball must face v
    (inward normal · v > 0) and the pieces' shadows on v⊥ must not overlap.
    """
    x0 = np.asarray(x0, dtype=float)
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    w = np.array([-v[1], v[0]])
    shadows = []
    for a, b, n in zip(omega.A, omega.B, omega.normals):
        piece = _clip_to_ball(a, b, x0, delta)
        if piece is None:
            continue
        if float(n @ v) <= 1e-14:
            return False
        s0, s1 = sorted((float(piece[0] @ w), float(piece[1] @ w)))
        shadows.append((s0, s1))
    if not shadows:
        raise NotApplicableError("ball misses the boundary", x0=x0.tolist(), delta=delta)
    shadows.sort()
    for (a0, a1), (b0, b1) in zip(shadows[:-1], shadows[1:]):
        if b0 < a1 - 1e-12 * max(1.0, abs(a1)):
            return False
    return True


def combine_directions(dirs: Sequence[Sequence[float]], weights: Sequence[float]) -> np.ndarray:
    """Normalized convex combination of unit vectors."""
    D = np.atleast_2d(np.asarray(dirs, dtype=float))
    lam = np.asarray(weights, dtype=float)
    if len(lam) != len(D) or np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-9:
        raise InvalidInputError("weights must be nonnegative and sum to 1")
    s = lam @ D
    nrm = float(np.linalg.norm(s))
    if nrm <= 1e-12:
        raise ContradictionError("combination of directions vanishes", norm=nrm)
    return s / nrm


@dataclass
class DirectionField:
    """PL blend of good directions at finitely many boundary points.

    Weights are hat functions of radius r_i = delta_i / 2 around each centre,
    so every contributing direction is good at the evaluation point at scale
    r_i. The field is defined on the `delta`-neighbourhood of the boundary.
    """

    domain: PolygonalDomain
    centers: np.ndarray
    directions: np.ndarray
    deltas: np.ndarray
    delta: float
    lipschitz: float = math.nan

    @property
    def radii(self) -> np.ndarray:
        return self.deltas / 2.0

    def weights(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        D = np.linalg.norm(P[:, None, :] - self.centers[None], axis=2)
        return np.maximum(0.0, 1.0 - D / self.radii[None])

    def __call__(self, P: np.ndarray) -> np.ndarray:
        Wt = self.weights(P)
        S = Wt @ self.directions
        nrm = np.linalg.norm(S, axis=1)
        if np.any(nrm <= 1e-12):
            raise ContradictionError("field undefined at a sampled point")
        return S / nrm[:, None]

    def local_scale(self, P: np.ndarray) -> np.ndarray:
        Wt = self.weights(P)
        R = np.where(Wt > 0, self.radii[None], np.inf)
        return R.min(axis=1)

    def to_json(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "lipschitz_estimate": self.lipschitz,
            "centers": self.centers.tolist(),
            "directions": self.directions.tolist(),
            "deltas": self.deltas.tolist(),
        }


def _half_clearance(omega: PolygonalDomain, x: np.ndarray, skip: Sequence[int]) -> float:
    mask = np.ones(omega.n_edges, dtype=bool)
    mask[list(skip)] = False
    if not mask.any():
        raise FieldConstructionError("no features to measure clearance against")
    d = segment_distances(x[None], omega.A[mask], omega.B[mask]).min()
    return 0.5 * float(d)


def direction_field(omega: PolygonalDomain, max_centers: int = 100_000) -> DirectionField:
    """Cover ∂Ω by balls with verified good directions and blend them.

    Corners get the normalized sum of the two adjacent inward normals, and
    edge points the edge normal. Each ball's scale is half the distance to the
    boundary features not meeting the centre. Edge points are placed greedily
    so that every boundary point is within r_i / 2 of some centre.
    """
    centers, dirs, deltas = [], [], []
    corner_r = np.zeros(omega.n_edges)
    for e in range(omega.n_edges):
        prev, _ = omega.edge_neighbours(e)
        x = omega.A[e]
        v = omega.normals[prev] + omega.normals[e]
        nv = float(np.linalg.norm(v))
        if nv <= 1e-12:
            raise FieldConstructionError("cusp at a vertex", vertex=x.tolist())
        delta = _half_clearance(omega, x, [prev, e])
        if delta <= 0:
            raise FieldConstructionError("touching boundary features", vertex=x.tolist())
        centers.append(x)
        dirs.append(v / nv)
        deltas.append(delta)
        corner_r[e] = delta / 2.0
    for e in range(omega.n_edges):
        _, nxt = omega.edge_neighbours(e)
        a, b, L = omega.A[e], omega.B[e], float(omega.lengths[e])
        u = (b - a) / L
        pos = corner_r[e] / 2.0
        stop = L - corner_r[nxt] / 2.0
        while pos < stop:
            t = max(stop - pos, 0.0)
            for _ in range(200):
                c = a + min(pos + t, L) * u
                r = _half_clearance(omega, c, [e]) / 2.0
                if t <= r / 2.0:
                    break
                t = 0.9 * r / 2.0
            if r <= 0 or t <= 1e-15 * L:
                raise FieldConstructionError("edge cover stalled", edge=e, position=pos)
            centers.append(c)
            dirs.append(omega.normals[e].copy())
            deltas.append(2.0 * r)
            pos = pos + t + r / 2.0
            if len(centers) > max_centers:
                raise FieldConstructionError("too many cover balls", edge=e)
    deltas_arr = np.asarray(deltas)
    fieldobj = DirectionField(omega, np.asarray(centers), np.asarray(dirs), deltas_arr,
                              float((deltas_arr / 4.0).min()))
    for x, v, dl in zip(fieldobj.centers, fieldobj.directions, fieldobj.deltas):
        if not is_good_direction(omega, x, v, dl):
            raise FieldConstructionError("cover direction failed verification", center=x.tolist())
    fieldobj.lipschitz = _field_lipschitz(fieldobj, np.random.default_rng(0))
    return fieldobj


def _field_lipschitz(F: DirectionField, rng: np.random.Generator, n: int = 2000) -> float:
    X = F.domain.sample_boundary(n, rng)
    h = F.delta * rng.uniform(0.01, 0.5, size=n)
    ang = rng.uniform(0, 2 * math.pi, size=n)
    Y = X + h[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    fx, fy = F(X), F(Y)
    return float((np.linalg.norm(fx - fy, axis=1) / np.linalg.norm(X - Y, axis=1)).max())


def verify_field(F: DirectionField, n_points: int = 1000, n_depths: int = 16, seed: int = 0) -> dict[str, Any]:
    """Sampled checks: good direction at each boundary point, and x + t ñ(x) ∈ Ω for t in (0, scale)."""
    rng = np.random.default_rng(seed)
    X = F.domain.sample_boundary(n_points, rng)
    V = F(X)
    scale = F.local_scale(X)
    good = sum(is_good_direction(F.domain, x, v, s) for x, v, s in zip(X, V, scale))
    ts = (np.arange(1, n_depths + 1) / (n_depths + 1))
    Q = (X[:, None, :] + (ts[None, :, None] * scale[:, None, None]) * V[:, None, :]).reshape(-1, 2)
    inside = F.domain.contains(Q)
    return {
        "points": n_points,
        "depths": n_depths,
        "good": int(good),
        "inward": int(inside.sum()),
        "inward_total": int(inside.size),
        "passed": bool(good == n_points and inside.all()),
    }


@dataclass
class ContractionMap:
    """f(x) = x + η φ(dist(x, ∂Ω)) ñ(x) with φ falling linearly from 1 to 0 at depth ρ."""

    field: DirectionField
    epsilon: float
    eta: float
    rho: float
    lipschitz: float = math.nan
    displacement: float = math.nan
    report: dict | None = None

    def phi(self, s: np.ndarray) -> np.ndarray:
        return np.maximum(0.0, 1.0 - s / self.rho)

    def __call__(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        ph = self.phi(self.field.domain.boundary_distance(P))
        out = P.copy()
        near = ph > 0
        if near.any():
            out[near] += self.eta * ph[near][:, None] * self.field(P[near])
        return out

    def homotopy(self, s: float, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return (1.0 - s) * P + s * self(P)

    def to_json(self) -> dict[str, Any]:
        return {"epsilon": self.epsilon, "eta": self.eta, "rho": self.rho,
                "lipschitz_estimate": self.lipschitz, "displacement": self.displacement,
                "report": self.report}


def _pairs(omega: PolygonalDomain, n: int, near_scale: float, rng: np.random.Generator):
    half = n // 2
    X1 = omega.sample_closure(half, rng)
    X2 = omega.sample_closure(half, rng)
    B = omega.sample_boundary(n - half, rng)
    h = near_scale * rng.uniform(0.01, 1.0, size=n - half)
    ang = rng.uniform(0, 2 * math.pi, size=n - half)
    B2 = B + h[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    keep = omega.contains(B2, closed=True)
    return np.vstack([X1, B[keep]]), np.vstack([X2, B2[keep]])


def check_contraction(f: ContractionMap, n_pairs: int = 10_000, seed: int = 0) -> dict[str, Any]:
    rng = np.random.default_rng(seed)
    omega = f.field.domain
    X, Y = _pairs(omega, n_pairs, f.rho, rng)
    sep = np.linalg.norm(X - Y, axis=1)
    ok = sep > 0
    lip = float((np.linalg.norm(f(X[ok]) - f(Y[ok]), axis=1) / sep[ok]).max())
    pts = np.vstack([omega.sample_closure(2000, rng), omega.sample_boundary(2000, rng)])
    img = f(pts)
    images_inside = bool(omega.contains(img).all())
    hom_inside = all(bool(omega.contains(f.homotopy(s, pts), closed=True).all()) for s in np.linspace(0, 1, 9))
    disp = float(np.linalg.norm(img - pts, axis=1).max())
    return {
        "pairs": int(ok.sum()),
        "lipschitz": lip,
        "lipschitz_bound": 1.0 + f.epsilon,
        "images_inside": images_inside,
        "homotopy_inside": hom_inside,
        "displacement": disp,
        "passed": bool(lip <= 1.0 + f.epsilon and images_inside and hom_inside and disp < f.epsilon),
    }


def contraction_map(omega: PolygonalDomain, epsilon: float, F: DirectionField | None = None,
                    seed: int = 0, n_pairs: int = 10_000, max_halvings: int = 20) -> ContractionMap:
    """A map pushing Ω̄ into Ω with Lip ≤ 1 + ε and displacement below ε (both sampled)."""
    if not epsilon > 0:
        raise InvalidInputError("epsilon must be positive", epsilon=epsilon)
    if F is None:
        F = direction_field(omega)
    rho = F.delta
    eta = min(epsilon / 2.0, rho / 2.0)
    last = None
    for _ in range(max_halvings + 1):
        f = ContractionMap(F, epsilon, eta, rho)
        rep = check_contraction(f, n_pairs, seed)
        if rep["passed"]:
            f.lipschitz = rep["lipschitz"]
            f.displacement = rep["displacement"]
            f.report = rep
            return f
        last = rep
        eta /= 2.0
    raise ConstructionError("no admissible eta after halving", last_report=last)


def no_retraction_witness(L: float, t: float) -> bool:
    """Whether B((t,t),Lt) ∩ B((−t,t),Lt) misses Ω̄ = {x_2 ≤ |x_1|} ∩ B̄(0,1).

    A lens point with x_2 ≤ |x_1| lies at distance at least √2·t from the
    farther centre, with equality only at the origin, and the origin is in Ω̄.
    So the lens meets Ω̄ exactly when Lt ≥ √2·t, whatever t ∈ (0, 1).
    """
    if not (0.0 < t < 1.0) or not L > 0:
        raise InvalidInputError("need t in (0, 1) and L > 0", L=L, t=t)
    return L * L < 2.0


def l_shape() -> PolygonalDomain:
    return PolygonalDomain([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def unit_square() -> PolygonalDomain:
    return PolygonalDomain([(0, 0), (1, 0), (1, 1), (0, 1)])


def square_annulus() -> PolygonalDomain:
    return PolygonalDomain([(-2, -2), (2, -2), (2, 2), (-2, 2)], [[(-1, -1), (-1, 1), (1, 1), (1, -1)]])
