"""Cubical skeletons, the radial retraction and the (dynamical) deformation of cycles.

Grid coordinates are y = (x - a) / epsilon. The cube W'(z) for z in Z^d is
centred at z, extends by 1 in the directions where z is even and is flat in
the directions where z is odd; W'_j is the union of the cubes with exactly
j even coordinates. The dual cube W''(z) swaps the roles. A point lies on
W'_j exactly when at least d - j of its grid coordinates are odd integers,
so the level of a point is read off from its exactly-odd coordinates.
Everything below works in grid coordinates and converts to world coordinates
only when chains are assembled.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .chains import (
    Chain,
    Point,
    boundary,
    canonicalize,
    collinear_normal_form,
    interval_product,
    mass,
    project_out,
    time_slice_embed,
)
from .errors import (
    DimensionMismatchError,
    NotACycleError,
    ShiftSearchError,
    SingularPositionError,
    UnsupportedError,
)
from .spacetime import SpaceTimeChain, linfty, variation

SNAP_TOL = 1e-9
CENTRE_TOL = 1e-12
SINGULAR_TOL = 1e-9
VERTEX_CLEARANCE = 1e-6
QUADRATURE_CLAMP = 1e-9
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class GridSpec:
    epsilon: float
    shift: tuple[float, ...]
    d: int
    k: int

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise DimensionMismatchError("epsilon must be positive", epsilon=self.epsilon)
        if len(self.shift) != self.d:
            raise DimensionMismatchError("shift has wrong dimension", d=self.d, got=len(self.shift))
        if any(abs(s) > self.epsilon * (1 + 1e-12) for s in self.shift):
            raise DimensionMismatchError("shift must lie in [-epsilon, epsilon]^d", shift=list(self.shift))

    def to_grid(self, x: Sequence[float]) -> Point:
        return tuple((float(xi) - ai) / self.epsilon for xi, ai in zip(x, self.shift))

    def to_world(self, y: Sequence[float]) -> Point:
        return tuple(ai + self.epsilon * yi for yi, ai in zip(y, self.shift))

    def to_json(self) -> dict[str, Any]:
        return {"epsilon": self.epsilon, "shift": list(self.shift), "d": self.d, "k": self.k}


def _is_odd(v: float) -> bool:
    return v == math.floor(v) and int(v) % 2 != 0


def level(y: Sequence[float]) -> int:
    """Smallest j with y on W'_j."""
    return len(y) - sum(1 for v in y if _is_odd(v))


def _nearest_even(v: float) -> int:
    return 2 * int(round(v / 2.0))


@dataclass(frozen=True)
class SkeletonCube:
    """The cube W'(z); its even coordinates are the free directions."""

    z: tuple[int, ...]
    even_set: frozenset[int]

    @property
    def dim(self) -> int:
        return len(self.even_set)

    def center(self, g: GridSpec) -> Point:
        return g.to_world(self.z)

    def primal_box(self, g: GridSpec) -> tuple[Point, Point]:
        lo = [z - 1 if i in self.even_set else z for i, z in enumerate(self.z)]
        hi = [z + 1 if i in self.even_set else z for i, z in enumerate(self.z)]
        return g.to_world(lo), g.to_world(hi)

    def dual_box(self, g: GridSpec) -> tuple[Point, Point]:
        lo = [z if i in self.even_set else z - 1 for i, z in enumerate(self.z)]
        hi = [z if i in self.even_set else z + 1 for i, z in enumerate(self.z)]
        return g.to_world(lo), g.to_world(hi)

    def contains(self, y: Sequence[float]) -> bool:
        for i, (v, z) in enumerate(zip(y, self.z)):
            if i in self.even_set:
                if abs(v - z) > 1.0:
                    return False
            elif v != z:
                return False
        return True


def _cell_of(y: Sequence[float]) -> SkeletonCube:
    z, even = [], []
    for i, v in enumerate(y):
        if _is_odd(v):
            z.append(int(v))
        else:
            z.append(_nearest_even(v))
            even.append(i)
    return SkeletonCube(tuple(z), frozenset(even))


def singular_distance(Y: np.ndarray, k: int) -> np.ndarray:
    """Distance from each row of Y (grid units) to the points with at least k+1 even coordinates."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    dist = np.abs(Y - 2.0 * np.round(Y / 2.0))
    return np.sqrt(np.sort(dist * dist, axis=1)[:, : k + 1].sum(axis=1))


def _radial(y: Point, cell: SkeletonCube) -> Point:
    free = sorted(cell.even_set)
    u = [y[i] - cell.z[i] for i in free]
    m = max(abs(v) for v in u)
    if m < CENTRE_TOL:
        raise SingularPositionError("point at the centre of its cell", point=list(y), cell=list(cell.z))
    out = list(y)
    for i, v in zip(free, u):
        w = v / m
        if abs(w - 1.0) <= SNAP_TOL:
            w = 1.0
        elif abs(w + 1.0) <= SNAP_TOL:
            w = -1.0
        out[i] = cell.z[i] + w
    return tuple(out)


def _sigma(y: Point, j: int) -> Point:
    lev = level(y)
    if lev < j:
        return y
    if lev > j:
        raise SingularPositionError("point has not reached the current skeleton", point=list(y), level=lev, j=j)
    return _radial(y, _cell_of(y))


def classify_point(x: Sequence[float], g: GridSpec, j: int) -> SkeletonCube:
    """The j-cell of W'_j reached by x after the descent stages d, ..., j+1."""
    y = g.to_grid(x)
    if j < g.d and float(singular_distance(np.asarray(y), j)[0]) < SINGULAR_TOL:
        raise SingularPositionError("point too close to the singular set", point=list(x), j=j)
    for stage in range(min(level(y), g.d), j, -1):
        y = _sigma(y, stage)
    cell = _cell_of(y)
    return cell


def sigma_step(x: Sequence[float], g: GridSpec, j: int) -> Point:
    """One retraction step from the open j-cells of W'_j onto W'_{j-1}."""
    y = g.to_grid(x)
    if level(y) < j:
        return tuple(float(v) for v in x)
    return g.to_world(_sigma(y, j))


# ---------------------------------------------------------------------------
# choosing the shift


def shift_integral(T: Chain, g: GridSpec) -> tuple[float, float, float]:
    """(∫ v^{-k} d||T||, M(T), min vertex v), all in grid units."""
    keys = list(T)
    if not keys:
        return 0.0, 0.0, math.inf
    V = (np.asarray(keys, dtype=float) - np.asarray(g.shift)) / g.epsilon
    c = np.fromiter((abs(T[key]) for key in keys), float, len(keys))
    vmin = float(singular_distance(V.reshape(-1, g.d), g.k).min())
    if T.k == 0:
        return float(c.sum()), float(c.sum()), vmin
    if T.k != 1:
        raise UnsupportedError("shift quadrature is implemented for k <= 1", k=T.k)
    p, q = V[:, 0, :], V[:, 1, :]
    length = np.linalg.norm(q - p, axis=1)
    total = np.zeros(len(keys))
    for x, w in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
        s = (x + 1.0) / 2.0
        v = np.maximum(singular_distance(p + s * (q - p), g.k), QUADRATURE_CLAMP)
        total += 0.5 * w * v ** (-T.k)
    return float(c @ (total * length)), float(c @ length), vmin


def _odd_clearance(T: Chain, g: GridSpec) -> float:
    """Distance in grid units from the vertices of T to the hyperplanes {y_i odd}.

    Vertices keep their input coordinates, so a vertex that rounds onto a
    skeleton hyperplane would not line up with the other points of that face.
    """
    if T.is_zero():
        return math.inf
    Y = (np.asarray(sorted(T.vertex_set()), dtype=float) - np.asarray(g.shift)) / g.epsilon
    return float(np.abs(Y - (2.0 * np.floor(Y / 2.0) + 1.0)).min())


def choose_shift(T: Chain, g: GridSpec | float, seed: int = 0, max_candidates: int = 1000) -> tuple[float, ...]:
    """Rejection-sample a shift a in [-eps, eps]^d passing the quadrature test.

    Accepts when ∫ v^{-k} d||T|| <= 2 binom(d, k) M(T) in grid units and no
    vertex is within VERTEX_CLEARANCE (grid units) of the singular set or of
    a skeleton hyperplane.
    """
    if not isinstance(g, GridSpec):
        g = GridSpec(float(g), (0.0,) * T.d, T.d, T.k)
    rng = np.random.default_rng(seed)
    bound_factor = 2.0 * math.comb(g.d, g.k)
    best: tuple[float, tuple[float, ...]] | None = None
    for _ in range(max_candidates):
        u = rng.uniform(-1.0, 1.0, size=g.d)
        a = tuple(float(g.epsilon * x) for x in u)
        cand = GridSpec(g.epsilon, a, g.d, g.k)
        integral, m, vmin = shift_integral(T, cand)
        if vmin >= VERTEX_CLEARANCE and _odd_clearance(T, cand) >= VERTEX_CLEARANCE \
                and integral <= bound_factor * m:
            return a
        if best is None or integral < best[0]:
            best = (integral, a)
    raise ShiftSearchError("no admissible shift found", candidates=max_candidates,
                           best_shift=list(best[1]) if best else None,
                           best_integral=best[0] if best else None)


# ---------------------------------------------------------------------------
# deformation


@dataclass
class DeformationResult:
    P: Chain
    R: Chain
    S: SpaceTimeChain | None
    grid: GridSpec
    diagnostics: dict[str, Any] = field(default_factory=dict)
    grid_points: dict[Point, Point] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out = {
            "grid": self.grid.to_json(),
            "P": self.P.to_json(),
            "R": self.R.to_json(),
            "diagnostics": self.diagnostics,
        }
        if self.S is not None:
            out["S"] = self.S.to_json()
        return out


class _WorldMap:
    """Grid point -> world point, keeping the exact input coordinates of T's vertices."""

    def __init__(self, g: GridSpec, pinned: Mapping[Point, Point] | None = None) -> None:
        self.g = g
        self.table: dict[Point, Point] = dict(pinned or {})

    def __call__(self, y: Point) -> Point:
        w = self.table.get(y)
        if w is None:
            w = self.table[y] = self.g.to_world(y)
        return w


def _lerp(p: Point, q: Point, s: float) -> Point:
    return tuple(a if a == b else a + s * (b - a) for a, b in zip(p, q))


def _odd_crossings(p: Point, q: Point) -> list[Point]:
    """Points strictly inside [p, q] where some coordinate is an odd integer."""
    hits: dict[float, dict[int, int]] = defaultdict(dict)
    for i, (a, b) in enumerate(zip(p, q)):
        if a == b:
            continue
        lo, hi = min(a, b), max(a, b)
        o = math.floor(lo) + 1
        if o % 2 == 0:
            o += 1
        while o < hi:
            s = (o - a) / (b - a)
            hits[s][i] = o
            o += 2
    out = []
    merged: list[tuple[float, dict[int, int]]] = []
    for s in sorted(hits):
        if merged and s - merged[-1][0] <= 1e-14:
            merged[-1][1].update(hits[s])
        else:
            merged.append((s, dict(hits[s])))
    for s, fixed in merged:
        pt = list(_lerp(p, q, s))
        for i, o in fixed.items():
            pt[i] = float(o)
        out.append(tuple(pt))
    return out


def _switch_params(a: Point, b: Point, cell: SkeletonCube, depth: int) -> list[float]:
    free = sorted(cell.even_set)
    ua = [a[i] - cell.z[i] for i in free]
    ub = [b[i] - cell.z[i] for i in free]
    params = {i / 2 ** depth for i in range(1, 2 ** depth)}
    n = len(free)
    for x in range(n):
        for y in range(x + 1, n):
            for sg in (1.0, -1.0):
                c0 = ua[x] - sg * ua[y]
                c1 = (ub[x] - ua[x]) - sg * (ub[y] - ua[y])
                if c1 == 0.0:
                    continue
                s = -c0 / c1
                if not 1e-12 < s < 1.0 - 1e-12:
                    continue
                u = [ua[i] + s * (ub[i] - ua[i]) for i in range(n)]
                m = max(abs(v) for v in u)
                if m - abs(u[x]) <= 1e-12 * max(m, 1.0):
                    params.add(s)
    return sorted(params)


def _stage_path(p: Point, q: Point, j: int, depth: int) -> list[Point]:
    """Image of the segment [p, q] under the stage-j retraction, as a polyline."""
    nodes = [p] + _odd_crossings(p, q) + [q]
    path = [_sigma(p, j)]
    for a, b in zip(nodes[:-1], nodes[1:]):
        mid = tuple((u + v) / 2.0 for u, v in zip(a, b))
        lev = level(mid)
        if lev < j:
            path.append(_sigma(b, j))
            continue
        cell = _cell_of(mid)
        for s in _switch_params(a, b, cell, depth):
            path.append(_radial(_lerp(a, b, s), cell))
        path.append(_sigma(b, j))
    out = [path[0]]
    for w in path[1:]:
        if w != out[-1]:
            out.append(w)
    return out


def _edge_keys(y: Point) -> list[tuple]:
    """Grid edges (free axis, fixed coordinates) whose closure contains the skeleton point y."""
    odd = [i for i, v in enumerate(y) if _is_odd(v)]
    d = len(y)
    if len(odd) == d:
        return [(f,) + tuple(v for i, v in enumerate(y) if i != f) for f in range(d)]
    if len(odd) == d - 1:
        f = next(i for i in range(d) if i not in odd)
        return [(f,) + tuple(v for i, v in enumerate(y) if i != f)]
    return []


def _refine_paths(paths: list[list[Point]], extra: Sequence[Point]) -> list[list[Point]]:
    """Insert every known skeleton point into the edge segments it lies on."""
    stops: dict[tuple, set[float]] = defaultdict(set)
    for y in [w for path in paths for w in path] + list(extra):
        for key in _edge_keys(y):
            stops[key].add(y[key[0]])
    sorted_stops = {key: sorted(v) for key, v in stops.items()}
    out = []
    for path in paths:
        new = [path[0]]
        for a, b in zip(path[:-1], path[1:]):
            diff = [i for i in range(len(a)) if a[i] != b[i]]
            if len(diff) == 1:
                f = diff[0]
                key = (f,) + tuple(v for i, v in enumerate(a) if i != f)
                lo, hi = min(a[f], b[f]), max(a[f], b[f])
                inner = [v for v in sorted_stops.get(key, []) if lo < v < hi]
                if a[f] > b[f]:
                    inner.reverse()
                for v in inner:
                    pt = list(a)
                    pt[f] = v
                    new.append(tuple(pt))
            new.append(b)
        out.append(new)
    return out


def _strip(p: Point, q: Point, path: Sequence[Point], c: float, ta: float, tb: float,
           W: _WorldMap) -> list[tuple[list[Point], float]]:
    """Triangulated homotopy from [p, q] at time ta to the polyline at time tb.

    Its boundary is δ_tb × path − δ_ta × [p, q] + [[(ta,p),(tb,p')]] − [[(ta,q),(tb,q')]].
    """
    P0, Q0 = (ta,) + W(p), (ta,) + W(q)
    top = [(tb,) + W(w) for w in path]
    r = len(top) // 2
    if len(top) == 1:
        return [([P0, Q0, top[0]], -c)]
    terms = [([P0, Q0, top[r]], -c)]
    for i in range(r):
        terms.append(([P0, top[i], top[i + 1]], c))
    for i in range(r, len(top) - 1):
        terms.append(([Q0, top[i], top[i + 1]], c))
    return terms


def _check_supported(T: Chain) -> None:
    if T.k not in (0, 1) or T.k >= T.d or T.d > 3:
        raise UnsupportedError("deformation supports k in {0, 1} and d <= 3 with k < d", k=T.k, d=T.d)
    if T.k == 1 and not boundary(T).is_zero():
        raise NotACycleError("deformation needs a cycle")


def _support_radius(T: Chain, pts: np.ndarray) -> float:
    if pts.size == 0 or T.is_zero():
        return 0.0
    keys = np.asarray(list(T), dtype=float)
    if T.k == 0:
        D = np.linalg.norm(pts[:, None, :] - keys[None, :, 0, :], axis=2)
        return float(D.min(axis=1).max())
    p, q = keys[:, 0, :], keys[:, 1, :]
    e = q - p
    ee = np.maximum((e * e).sum(axis=1), 1e-300)
    best = np.full(len(pts), np.inf)
    for start in range(0, len(pts), 256):
        X = pts[start:start + 256]
        s = np.clip(((X[:, None, :] - p[None]) * e[None]).sum(axis=2) / ee[None], 0.0, 1.0)
        foot = p[None] + s[:, :, None] * e[None]
        best[start:start + 256] = np.linalg.norm(X[:, None, :] - foot, axis=2).min(axis=1)
    return float(best.max())


def _vertices(*chains: Chain) -> np.ndarray:
    pts = {v for C in chains for key in C for v in key}
    return np.asarray(sorted(pts), dtype=float) if pts else np.zeros((0, 0))


def dynamical_deform(T: Chain, epsilon: float, shift: Sequence[float] | None = None, seed: int = 0,
                     depth: int = 2, refine_with: Mapping[Point, Point] | None = None,
                     with_profile: bool = True) -> DeformationResult:
    """Deform a cycle onto the shifted epsilon-skeleton, recording the motion as a trajectory.

    Stage j (j = d, ..., k+1) occupies the time slab [(d-j)/n, (d-j+1)/n] with
    n = d - k and retracts the current polyline from W'_j onto W'_{j-1}.
    refine_with maps extra grid points to world points; they are inserted into
    the final skeletal polyline (used to refine two deformations jointly).
    """
    _check_supported(T)
    k, d = T.k, T.d
    if shift is None:
        shift = choose_shift(T, GridSpec(float(epsilon), (0.0,) * d, d, k), seed=seed)
    g = GridSpec(float(epsilon), tuple(float(s) for s in shift), d, k)
    pinned = {g.to_grid(v): v for key in T for v in key}
    if refine_with:
        pinned.update(refine_with)
    W = _WorldMap(g, pinned)
    n = d - k
    stages = list(range(d, k, -1))
    raw: list[tuple[list[Point], float]] = []
    singular = float(singular_distance(_vertices(T), k).min()) if not T.is_zero() else math.inf
    if k == 0:
        pts = [(g.to_grid(key[0]), c) for key, c in T.items()]
        for idx, j in enumerate(stages):
            ta, tb = idx / n, (idx + 1) / n
            nxt = []
            for y, c in pts:
                y2 = _sigma(y, j)
                raw.append(([(ta,) + W(y), (tb,) + W(y2)], c))
                nxt.append((y2, c))
            pts = nxt
        P = canonicalize([([W(y)], c) for y, c in pts], k=0, d=d) if pts else Chain(0, d)
    else:
        segs = [(g.to_grid(key[0]), g.to_grid(key[1]), c) for key, c in T.items()]
        for idx, j in enumerate(stages):
            ta, tb = idx / n, (idx + 1) / n
            paths = [_stage_path(p, q, j, depth) for p, q, _ in segs]
            if j == k + 1:
                paths = _refine_paths(paths, list(refine_with or ()))
            nxt = []
            for (p, q, c), path in zip(segs, paths):
                if list(path) == [p, q]:
                    prism = interval_product(ta, tb, Chain.simplex([W(p), W(q)], c))
                    raw.extend(([list(key), cc]) for key, cc in prism.items())
                else:
                    raw.extend(_strip(p, q, path, c, ta, tb, W))
                nxt.extend((a, b, c) for a, b in zip(path[:-1], path[1:]))
            segs = nxt
        P = canonicalize([([W(a), W(b)], c) for a, b, c in segs], k=1, d=d) if segs else Chain(1, d)
    S_chain = canonicalize(raw, k=k + 1, d=d + 1) if raw else Chain(k + 1, d + 1)
    S = SpaceTimeChain(S_chain, check=False)
    R = -project_out(S_chain, 0)
    grid_points = {y: w for y, w in W.table.items()
                   if any(w in key for key in P)} if not P.is_zero() else {}
    diag = _diagnostics(T, P, R, S, g, depth, with_profile)
    diag["min_vertex_singular_distance"] = singular
    return DeformationResult(P, R, S, g, diag, grid_points)


def deform(T: Chain, epsilon: float, shift: Sequence[float] | None = None, seed: int = 0,
           depth: int = 2) -> DeformationResult:
    """T = P + ∂R with P on the epsilon-skeleton W'_k."""
    res = dynamical_deform(T, epsilon, shift, seed, depth, with_profile=False)
    res.S = None
    return res


def defect(T: Chain, P: Chain, R: Chain) -> float:
    """Mass of T − P − ∂R after merging collinear overlaps; an upper bound for its flat norm."""
    diff = T - P - boundary(R)
    if diff.k == 1:
        diff = collinear_normal_form(diff)
    return mass(diff)


def _diagnostics(T: Chain, P: Chain, R: Chain, S: SpaceTimeChain, g: GridSpec, depth: int,
                 with_profile: bool) -> dict[str, Any]:
    mT = mass(T)
    eps = g.epsilon
    var = variation(S)
    out: dict[str, Any] = {
        "mass_T": mT,
        "mass_P": mass(P),
        "mass_R": mass(R),
        "var_S": var,
        "subdivision_depth": depth,
        "defect": defect(T, P, R),
        "support_radius": _support_radius(T, _vertices(P, R)),
        "support_bound": 2 * g.d * eps,
    }
    bd = boundary(S.chain)
    out["boundary_exact"] = bool(bd == time_slice_embed(1.0, P) - time_slice_embed(0.0, T))
    if mT > 0:
        out["ratio_P"] = out["mass_P"] / mT
        out["ratio_R"] = out["mass_R"] / (eps * mT)
        out["ratio_var"] = var / (eps * mT)
    if with_profile:
        value, prof = linfty(S, refine_check=False)
        out["linfty"] = value
        if mT > 0:
            out["ratio_linfty"] = value / mT
    return out
