"""Polyhedral chains in R^d with real coefficients.

A chain is stored as a sparse map from canonical simplices to coefficients.
A simplex is a tuple of vertex tuples. The canonical form sorts the vertices
lexicographically and folds the sign of the sorting permutation into the
coefficient, so two chains are equal exactly when their term maps agree.
Vertex coordinates are compared exactly, without snapping.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from types import MappingProxyType
from typing import Any

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidHyperplaneError,
    InvalidIntervalError,
    UndefinedBoundaryError,
)

Point = tuple[float, ...]
Simplex = tuple[Point, ...]

COEFF_RTOL = 1e-12
DEGENERACY_TOL = 1e-12


def _as_point(v: Iterable[float]) -> Point:
    return tuple(float(x) for x in v)


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def sort_simplex(vertices: Sequence[Point]) -> tuple[Simplex, int]:
    """Return the lexicographically sorted simplex and the permutation sign."""
    order = sorted(range(len(vertices)), key=lambda i: vertices[i])
    return tuple(vertices[i] for i in order), _perm_sign(order)


def _edge_minor_norm(e1: Point, e2: Point) -> float:
    total = 0.0
    n = len(e1)
    for i in range(n):
        for j in range(i + 1, n):
            m = e1[i] * e2[j] - e1[j] * e2[i]
            total += m * m
    return math.sqrt(total)


def is_degenerate(simplex: Simplex) -> bool:
    """True when the affine dimension of the simplex is below its nominal dimension.

    Repeated vertices are detected exactly. Otherwise the k-volume is compared
    with the product of edge lengths, a scale-free test at DEGENERACY_TOL.
    """
    k = len(simplex) - 1
    if k == 0:
        return False
    if len(set(simplex)) < len(simplex):
        return True
    if k == 1:
        return False
    v0 = simplex[0]
    edges = [tuple(a - b for a, b in zip(v, v0)) for v in simplex[1:]]
    if k > len(v0):
        return True
    lengths = [math.sqrt(sum(x * x for x in e)) for e in edges]
    scale = math.prod(lengths)
    if scale == 0.0:
        return True
    if k == 2:
        return _edge_minor_norm(edges[0], edges[1]) <= DEGENERACY_TOL * scale
    sv = np.linalg.svd(np.array(edges) / np.array(lengths)[:, None], compute_uv=False)
    return bool(sv[-1] <= DEGENERACY_TOL)


class Chain:
    """An immutable real-coefficient polyhedral k-chain in R^d."""

    __slots__ = ("k", "d", "_terms")

    def __init__(self, k: int, d: int, terms: Mapping[Simplex, float] | None = None) -> None:
        if k < 0 or d < 1:
            raise DimensionMismatchError("need k >= 0 and d >= 1", k=k, d=d)
        self.k = int(k)
        self.d = int(d)
        self._terms: Mapping[Simplex, float] = MappingProxyType(dict(terms or {}))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, k: int, d: int) -> Chain:
        return cls(k, d)

    @classmethod
    def simplex(cls, vertices: Sequence[Sequence[float]], coeff: float = 1.0) -> Chain:
        pts = [_as_point(v) for v in vertices]
        return canonicalize([(pts, coeff)])

    @classmethod
    def _from_canonical(cls, k: int, d: int, items: Iterable[tuple[Simplex, float]],
                        scale: float | None = None) -> Chain:
        acc: dict[Simplex, float] = defaultdict(float)
        biggest = 0.0
        for key, c in items:
            acc[key] += c
            biggest = max(biggest, abs(c))
        if scale is None:
            scale = biggest
        cut = COEFF_RTOL * scale
        return cls(k, d, {key: c for key, c in acc.items() if abs(c) > cut})

    # mapping protocol ---------------------------------------------------
    @property
    def terms(self) -> Mapping[Simplex, float]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, key: Simplex) -> float:
        return self._terms.get(key, 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def max_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def vertex_set(self) -> set[Point]:
        return {v for key in self._terms for v in key}

    # arithmetic -----------------------------------------------------------
    def _check(self, other: Chain) -> None:
        if not isinstance(other, Chain):
            raise TypeError(f"expected Chain, got {type(other).__name__}")
        if (self.k, self.d) != (other.k, other.d):
            raise DimensionMismatchError(
                "chains have different dimensions",
                left=[self.k, self.d], right=[other.k, other.d])

    def __add__(self, other: Chain) -> Chain:
        self._check(other)
        scale = max(self.max_coeff(), other.max_coeff())
        return Chain._from_canonical(
            self.k, self.d, itertools.chain(self.items(), other.items()), scale)

    def __neg__(self) -> Chain:
        return Chain(self.k, self.d, {key: -c for key, c in self.items()})

    def __sub__(self, other: Chain) -> Chain:
        return self + (-other)

    def __mul__(self, scalar: float) -> Chain:
        s = float(scalar)
        if s == 0.0:
            return Chain(self.k, self.d)
        return Chain(self.k, self.d, {key: s * c for key, c in self.items()})

    __rmul__ = __mul__

    def equals(self, other: Chain) -> bool:
        """Canonical equality: the difference canonicalizes to the zero chain."""
        if not isinstance(other, Chain) or (self.k, self.d) != (other.k, other.d):
            return False
        return (self - other).is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.equals(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Chain(k={self.k}, d={self.d}, terms={len(self)})"

    # geometry shortcuts -----------------------------------------------------
    def boundary(self) -> Chain:
        return boundary(self)

    def mass(self) -> float:
        return mass(self)

    def pushforward(self, matrix: Any, translation: Any = None) -> Chain:
        return affine_pushforward(self, matrix, translation)

    # serialization ------------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "d": self.d,
            "terms": [{"vertices": [list(v) for v in key], "coeff": c}
                      for key, c in sorted(self.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Chain:
        k, d = int(data["k"]), int(data["d"])
        raw = [([_as_point(v) for v in t["vertices"]], float(t["coeff"]))
               for t in data.get("terms", [])]
        return canonicalize(raw, k=k, d=d)


def canonicalize(raw_terms: Iterable[tuple[Sequence[Sequence[float]], float]],
                 k: int | None = None, d: int | None = None) -> Chain:
    """Build a canonical chain from (simplex vertices, coefficient) pairs.

    Duplicates are merged, degenerate simplices are dropped and coefficients
    below COEFF_RTOL times the largest input coefficient are removed.
    """
    items: list[tuple[Simplex, float]] = []
    biggest = 0.0
    for verts, coeff in raw_terms:
        pts = [_as_point(v) for v in verts]
        kk, dd = len(pts) - 1, len(pts[0])
        if k is None:
            k, d = kk, dd
        if kk != k or dd != d or any(len(p) != d for p in pts):
            raise DimensionMismatchError("mixed simplex dimensions", expected=[k, d], got=[kk, dd])
        coeff = float(coeff)
        biggest = max(biggest, abs(coeff))
        key, sign = sort_simplex(pts)
        if coeff == 0.0 or is_degenerate(key):
            continue
        items.append((key, sign * coeff))
    if k is None:
        raise DimensionMismatchError("cannot infer dimensions of an empty chain")
    return Chain._from_canonical(k, d, items, biggest)


def boundary(T: Chain) -> Chain:
    """Alternating sum of facets, canonicalized."""
    if T.k == 0:
        raise UndefinedBoundaryError("boundary of a 0-chain is undefined")
    items = []
    for key, c in T.items():
        for i in range(len(key)):
            items.append((key[:i] + key[i + 1:], c if i % 2 == 0 else -c))
    return Chain._from_canonical(T.k - 1, T.d, items, T.max_coeff())


def simplex_volumes(keys: Sequence[Simplex]) -> np.ndarray:
    """k-dimensional Hausdorff measure of each simplex (|det R| of the edge QR / k!)."""
    if not keys:
        return np.zeros(0)
    k = len(keys[0]) - 1
    if k == 0:
        return np.ones(len(keys))
    V = np.asarray(keys, dtype=float)
    E = V[:, 1:, :] - V[:, :1, :]
    if k > V.shape[2]:
        return np.zeros(len(keys))
    R = np.linalg.qr(np.swapaxes(E, 1, 2), mode="r")
    return np.abs(np.prod(np.diagonal(R, axis1=1, axis2=2), axis=1)) / math.factorial(k)


def mass(T: Chain) -> float:
    """Sum of |coefficient| times k-volume."""
    if T.is_zero():
        return 0.0
    keys = list(T)
    vols = simplex_volumes(keys)
    coeffs = np.fromiter((abs(T[key]) for key in keys), float, len(keys))
    return float(coeffs @ vols)


def _affine_map(matrix: Any, translation: Any, d: int) -> tuple[list[list[float]], list[float]]:
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    if A.shape[1] != d:
        raise DimensionMismatchError("affine map has wrong source dimension",
                                     expected=d, got=A.shape[1])
    m = A.shape[0]
    b = np.zeros(m) if translation is None else np.asarray(translation, dtype=float).reshape(m)
    return A.tolist(), b.tolist()


def map_point(A: list[list[float]], b: list[float], v: Point) -> Point:
    """Apply an affine map with a fixed summation order so results are reproducible."""
    return tuple(sum(row[j] * v[j] for j in range(len(v))) + bi for row, bi in zip(A, b))


def affine_pushforward(T: Chain, matrix: Any, translation: Any = None) -> Chain:
    """Vertex-wise image under x -> A x + b, canonicalized."""
    A, b = _affine_map(matrix, translation, T.d)
    cache: dict[Point, Point] = {}

    def img(v: Point) -> Point:
        out = cache.get(v)
        if out is None:
            out = cache[v] = map_point(A, b, v)
        return out

    raw = [([img(v) for v in key], c) for key, c in T.items()]
    if not raw:
        return Chain(T.k, len(b))
    return canonicalize(raw, k=T.k, d=len(b))


def map_vertices(T: Chain, fn, d_out: int | None = None) -> Chain:
    """Push T forward by a vertex map fn (the caller guarantees it is affine on each simplex)."""
    cache: dict[Point, Point] = {}
    raw = []
    for key, c in T.items():
        verts = []
        for v in key:
            w = cache.get(v)
            if w is None:
                w = cache[v] = tuple(fn(v))
            verts.append(w)
        raw.append((verts, c))
    if not raw:
        return Chain(T.k, d_out if d_out is not None else T.d)
    return canonicalize(raw, k=T.k, d=len(raw[0][0][0]))


def project_out(T: Chain, axis: int = 0) -> Chain:
    """Drop one coordinate (exact; used for the spatial projection p)."""
    return map_vertices(T, lambda v: v[:axis] + v[axis + 1:], T.d - 1)


def interval_product(a: float, b: float, T: Chain) -> Chain:
    """[[a,b]] x T as the staircase decomposition of each prism.

    Orientation: [[a,b]] x [[v0..vk]] = sum_i (-1)^i [[(a,v0)..(a,vi),(b,vi)..(b,vk)]],
    which gives d([[a,b]] x T) = delta_b x T - delta_a x T - [[a,b]] x dT.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise InvalidIntervalError("need a < b", a=a, b=b)
    items = []
    for key, c in T.items():
        lo = [(a,) + v for v in key]
        hi = [(b,) + v for v in key]
        for i in range(len(key)):
            simplex = tuple(lo[: i + 1] + hi[i:])
            items.append((simplex, c if i % 2 == 0 else -c))
    return Chain._from_canonical(T.k + 1, T.d + 1, items, T.max_coeff())


def time_slice_embed(t: float, T: Chain) -> Chain:
    """delta_t x T: the chain T placed at time t in R^{1+d}."""
    t = float(t)
    items = [(tuple((t,) + v for v in key), c) for key, c in T.items()]
    return Chain._from_canonical(T.k, T.d + 1, items, T.max_coeff())


# ---------------------------------------------------------------------------
# half-space restriction


def _affine_dim(points: Sequence[Point]) -> int:
    if len(points) <= 1:
        return 0
    P = np.asarray(points, dtype=float)
    E = P[1:] - P[0]
    scale = np.abs(E).max()
    if scale == 0.0:
        return 0
    sv = np.linalg.svd(E / scale, compute_uv=False)
    return int((sv > 1e-10).sum())


def _orient_like(child: Simplex, parent_edges: np.ndarray) -> tuple[Simplex, int] | None:
    c0 = np.asarray(child[0])
    Ec = np.asarray(child[1:]) - c0
    det = np.linalg.det(Ec @ parent_edges.T)
    if det == 0.0:
        return None
    return child, (1 if det > 0 else -1)


def _clip_simplex(key: Simplex, g: Sequence[float], cut_points: dict,
                  strict: bool) -> list[tuple[Simplex, int]]:
    """Pieces of simplex ∩ {g <= 0} with orientation signs relative to the simplex.

    The clipped polytope is split by a pulling triangulation that cones from the
    lexicographically smallest vertex over the facets not containing it. The
    triangulation of a face depends only on that face, so neighbouring
    simplices induce identical pieces on shared faces and interior faces cancel
    exactly under the boundary map.
    """
    k = len(key) - 1
    if all(x <= 0.0 for x in g):
        if strict and all(x == 0.0 for x in g):
            return []
        return [(key, 1)]
    if not any(x < 0.0 for x in g):
        return []
    if k == 0:
        return []

    def cut(i: int, j: int) -> Point:
        ck = (key[i], key[j]) if key[i] < key[j] else (key[j], key[i])
        return cut_points[ck]

    if k == 1:
        p, q = key
        x = cut(0, 1)
        if g[0] < 0.0:
            return [((p, x), 1)]
        return [((x, q), 1)]

    n = len(key)
    crossing = [(i, j) for i in range(n) for j in range(i + 1, n)
                if (g[i] < 0.0 < g[j]) or (g[j] < 0.0 < g[i])]
    coords: dict[Any, Point] = {}
    for i in range(n):
        if g[i] <= 0.0:
            coords[("v", i)] = key[i]
    for i, j in crossing:
        coords[("c", i, j)] = cut(i, j)

    def q_labels(F: frozenset) -> frozenset:
        labs = {("v", i) for i in F if g[i] <= 0.0}
        labs |= {("c", i, j) for i, j in crossing if i in F and j in F}
        return frozenset(labs)

    def h_labels(F: frozenset) -> frozenset:
        labs = {("v", i) for i in F if g[i] == 0.0}
        labs |= {("c", i, j) for i, j in crossing if i in F and j in F}
        return frozenset(labs)

    dims: dict[frozenset, int] = {}

    def dim_of(labs: frozenset) -> int:
        if labs not in dims:
            dims[labs] = _affine_dim([coords[x] for x in labs]) if labs else -1
        return dims[labs]

    memo: dict[frozenset, list[tuple]] = {}

    def triangulate(kind: str, F: frozenset, m: int) -> list[tuple]:
        labs = q_labels(F) if kind == "Q" else h_labels(F)
        if labs in memo:
            return memo[labs]
        if m == 0:
            memo[labs] = [tuple(labs)]
            return memo[labs]
        w = min(labs, key=lambda x: coords[x])
        facets: dict[frozenset, tuple[str, frozenset]] = {}
        for i in F:
            G = F - {i}
            cand = q_labels(G) if kind == "Q" else h_labels(G)
            if cand and cand not in facets and dim_of(cand) == m - 1:
                facets[cand] = (kind, G)
        if kind == "Q":
            cand = h_labels(F)
            if cand and cand not in facets and dim_of(cand) == m - 1:
                facets[cand] = ("H", F)
        out = []
        for labs_g, (kg, G) in facets.items():
            if w in labs_g:
                continue
            for s in triangulate(kg, G, m - 1):
                out.append(s + (w,))
        memo[labs] = out
        return out

    full = frozenset(range(n))
    if dim_of(q_labels(full)) < k:
        return []
    parent_edges = np.asarray(key[1:]) - np.asarray(key[0])
    pieces = []
    for labs in triangulate("Q", full, k):
        verts = tuple(coords[x] for x in labs)
        res = _orient_like(verts, parent_edges)
        if res is not None:
            pieces.append(res)
    return pieces


def restrict_halfspace(T: Chain, normal: Sequence[float], c: float, side: str = "<=",
                       strict: bool = False) -> Chain:
    """T restricted to {x . n <= c} (side '<=') or {x . n >= c} (side '>=').

    Simplices lying inside the hyperplane are kept unless strict is set, which
    realizes the open half-space.
    """
    n = [float(x) for x in normal]
    if len(n) != T.d:
        raise DimensionMismatchError("normal has wrong dimension", expected=T.d, got=len(n))
    if all(x == 0.0 for x in n):
        raise InvalidHyperplaneError("zero normal vector")
    if side not in ("<=", ">="):
        raise ValueError("side must be '<=' or '>='")
    sgn = 1.0 if side == "<=" else -1.0
    nz = [i for i, x in enumerate(n) if x != 0.0]
    axis = nz[0] if len(nz) == 1 else None
    level = float(c) / n[axis] if axis is not None else None
    values: dict[Point, float] = {}

    def gval(v: Point) -> float:
        out = values.get(v)
        if out is None:
            if axis is not None:
                out = sgn * (v[axis] - level) * (1.0 if n[axis] > 0 else -1.0)
            else:
                out = sgn * (sum(a * b for a, b in zip(n, v)) - c)
            values[v] = out
        return out

    class _Cuts(dict):
        def __missing__(self, pq):
            p, q = pq
            gp, gq = gval(p), gval(q)
            lam = gp / (gp - gq)
            x = [pi + lam * (qi - pi) for pi, qi in zip(p, q)]
            if axis is not None:
                x[axis] = level
            pt = tuple(x)
            self[pq] = pt
            return pt

    cuts = _Cuts()
    items = []
    for key, coeff in T.items():
        g = [gval(v) for v in key]
        for piece, sign in _clip_simplex(key, g, cuts, strict):
            items.append((list(piece), sign * coeff))
    if not items:
        return Chain(T.k, T.d)
    return canonicalize(items, k=T.k, d=T.d)


# ---------------------------------------------------------------------------
# simple multivectors


class MultiVector:
    """The simple m-vector w_1 ∧ ... ∧ w_m in R^n given by its spanning vectors."""

    def __init__(self, spanning: Any) -> None:
        self.spanning = np.atleast_2d(np.asarray(spanning, dtype=float))
        self._coords: dict[tuple[int, ...], float] | None = None

    @property
    def m(self) -> int:
        return self.spanning.shape[0]

    @property
    def n(self) -> int:
        return self.spanning.shape[1]

    def coordinates(self) -> dict[tuple[int, ...], float]:
        """Expansion over e_I for increasing multi-indices I (the m x m minors)."""
        if self._coords is None:
            W = self.spanning
            self._coords = {I: float(np.linalg.det(W[:, I]))
                            for I in itertools.combinations(range(self.n), self.m)}
        return self._coords

    def norm(self) -> float:
        if self.m > self.n:
            return 0.0
        R = np.linalg.qr(self.spanning.T, mode="r")
        return float(abs(np.prod(np.diag(R))))


def simple_norms(eta: MultiVector | Any) -> tuple[float, float, float]:
    """(|eta|, |p eta|, |eta contracted with dt|) for a simple multivector in R^{1+d}.

    The Euclidean norm uses the Gram determinant of the spanning vectors; the
    other two split the coordinate expansion by whether the multi-index
    contains the time direction 0.
    """
    if not isinstance(eta, MultiVector):
        eta = MultiVector(eta)
    euclid = eta.norm()
    coords = eta.coordinates()
    spatial = math.sqrt(sum(v * v for I, v in coords.items() if I[0] != 0))
    temporal = math.sqrt(sum(v * v for I, v in coords.items() if I[0] == 0))
    return euclid, spatial, temporal


def simplex_norms(keys: Sequence[Simplex]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (|eta|, |p eta|, |eta contracted with dt|) of each simplex's edge multivector."""
    if not keys:
        z = np.zeros(0)
        return z, z, z
    V = np.asarray(keys, dtype=float)
    E = V[:, 1:, :] - V[:, :1, :]
    m = E.shape[1]

    # |e_1 ^ ... ^ e_m| as |det R| of a QR factorization: same value as the
    # Gram determinant without squaring the condition number
    def gram_norm(X: np.ndarray) -> np.ndarray:
        if m > X.shape[2]:
            return np.zeros(X.shape[0])
        R = np.linalg.qr(np.swapaxes(X, 1, 2), mode="r")
        return np.abs(np.prod(np.diagonal(R, axis1=1, axis2=2), axis=1))

    # minors rather than a Gram determinant for the split parts: nearly
    # time-like pieces would otherwise lose half their digits to cancellation
    def minor_sq(cols: tuple[int, ...]) -> np.ndarray:
        sub = E[:, :, cols]
        return np.linalg.det(sub) ** 2 if m > 1 else sub[:, 0, 0] ** 2

    euclid = gram_norm(E)
    n = E.shape[2]
    spatial_sq = np.zeros(E.shape[0])
    temporal_sq = np.zeros(E.shape[0])
    for I in itertools.combinations(range(n), m):
        if I[0] == 0:
            temporal_sq += minor_sq(I)
        else:
            spatial_sq += minor_sq(I)
    return euclid, np.sqrt(spatial_sq), np.sqrt(temporal_sq)


# ---------------------------------------------------------------------------
# 1-chains: merging collinear overlaps


def collinear_normal_form(T: Chain, tol: float = 1e-9) -> Chain:
    """Rewrite a 1-chain so that overlapping collinear segments are merged.

    Segments on a common line are cut at every endpoint on that line and the
    coefficients of identical pieces are summed. The result represents the
    same current; pieces with cancelling coefficients disappear. 0-chains are
    returned unchanged.
    """
    if T.k == 0 or T.is_zero():
        return T
    if T.k != 1:
        raise DimensionMismatchError("collinear normal form is defined for 1-chains", k=T.k)
    pts = np.asarray([v for key in T for v in key], dtype=float)
    scale = max(float(np.abs(pts).max()), 1.0)
    q = tol * scale
    groups: dict[tuple, list[tuple[float, float, float]]] = defaultdict(list)
    frames: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    for (p, r), c in T.items():
        P, R = np.asarray(p), np.asarray(r)
        u = R - P
        u = u / np.linalg.norm(u)
        nzi = int(np.flatnonzero(np.abs(u) > 1e-12)[0])
        if u[nzi] < 0:
            u = -u
        foot = P - (P @ u) * u
        key = tuple(np.round(u / tol).astype(np.int64)) + tuple(np.round(foot / q).astype(np.int64))
        frames.setdefault(key, (u, foot))
        s0, s1 = float(P @ u), float(R @ u)
        if s0 < s1:
            groups[key].append((s0, s1, c))
        else:
            groups[key].append((s1, s0, -c))
    items = []
    for key, segs in groups.items():
        u, foot = frames[key]
        cuts = sorted({s for a, b, _ in segs for s in (a, b)})
        merged: list[float] = []
        for s in cuts:
            if not merged or s - merged[-1] > q:
                merged.append(s)
        delta = defaultdict(float)
        for a, b, c in segs:
            ia = min(range(len(merged)), key=lambda i: abs(merged[i] - a))
            ib = min(range(len(merged)), key=lambda i: abs(merged[i] - b))
            delta[ia] += c
            delta[ib] -= c
        run = 0.0
        for i in range(len(merged) - 1):
            run += delta[i]
            if run != 0.0:
                a = tuple((foot + merged[i] * u).tolist())
                b = tuple((foot + merged[i + 1] * u).tolist())
                items.append(([a, b], run))
    if not items:
        return Chain(1, T.d)
    return canonicalize(items, k=1, d=T.d)
