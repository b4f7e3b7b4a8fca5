"""Finite simplicial complexes and flat norms computed as linear programs.

The flat norm here is the simplicial one: fillings range over chains of the
given complex, so the value over-approximates the continuum flat norm of the
underlying polytope.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .chains import Chain, Point, Simplex, canonicalize, is_degenerate, simplex_volumes, sort_simplex
from .errors import (
    BalanceError,
    DimensionMismatchError,
    MeshConformityError,
    NotACycleError,
    NotInComplexError,
    SolverError,
)
from .lp import LPSolver, solve_lp


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A face-closed complex. cells[j] holds canonical j-simplices."""

    d: int
    dim: int
    cells: tuple[tuple[Simplex, ...], ...]
    index: tuple[dict, ...]
    boundary_matrix: tuple[np.ndarray | None, ...]
    weights: tuple[np.ndarray, ...]

    @property
    def vertices(self) -> list[Point]:
        return [s[0] for s in self.cells[0]]

    def n_cells(self, j: int) -> int:
        return len(self.cells[j]) if 0 <= j <= self.dim else 0

    def to_mesh_json(self) -> dict[str, Any]:
        vidx = self.index[0]
        return {
            "d": self.d,
            "dim": self.dim,
            "vertices": [list(v) for v in self.vertices],
            "cells": [[vidx[(v,)] for v in s] for s in self.cells[self.dim]],
        }


def _check_conformity(tops: Sequence[Simplex], verts: Sequence[Point]) -> None:
    V = np.asarray(verts, dtype=float)
    scale = max(float(np.abs(V).max()), 1.0)
    tol = 1e-10 * scale
    for s in tops:
        P = np.asarray(s, dtype=float)
        lo, hi = P.min(axis=0) - tol, P.max(axis=0) + tol
        inbox = np.flatnonzero(np.all((V >= lo) & (V <= hi), axis=1))
        if inbox.size == 0:
            continue
        own = set(s)
        cand = [i for i in inbox if verts[i] not in own]
        if not cand:
            continue
        E = (P[1:] - P[0]).T
        X = V[cand] - P[0]
        lam, *_ = np.linalg.lstsq(E, X.T, rcond=None)
        resid = np.linalg.norm(E @ lam - X.T, axis=0)
        inside = (resid <= tol) & np.all(lam >= -1e-10, axis=0) & (lam.sum(axis=0) <= 1 + 1e-10)
        if inside.any():
            bad = cand[int(np.flatnonzero(inside)[0])]
            raise MeshConformityError(
                "a vertex lies on a cell it does not belong to (cells must meet in common faces)",
                vertex=list(verts[bad]), cell=[list(v) for v in s])


def build_complex(cells: Sequence[Sequence[Sequence[float]]], check: bool = True) -> SimplicialComplex:
    """Face closure, boundary matrices and volume weights of a conforming mesh."""
    if not cells:
        raise MeshConformityError("empty mesh")
    tops: list[Simplex] = []
    dim = len(cells[0]) - 1
    d = len(cells[0][0])
    for c in cells:
        pts = [tuple(float(x) for x in v) for v in c]
        if len(pts) - 1 != dim or any(len(p) != d for p in pts):
            raise DimensionMismatchError("mesh cells must share dimension", expected=[dim, d])
        key, _ = sort_simplex(pts)
        if is_degenerate(key):
            raise MeshConformityError("degenerate cell", cell=[list(v) for v in key])
        tops.append(key)
    if len(set(tops)) != len(tops):
        raise MeshConformityError("duplicate cells")
    faces: list[set[Simplex]] = [set() for _ in range(dim + 1)]
    for s in tops:
        for j in range(dim + 1):
            faces[j].update(itertools.combinations(s, j + 1))
    cell_lists = tuple(tuple(sorted(f)) for f in faces)
    index = tuple({s: i for i, s in enumerate(cl)} for cl in cell_lists)
    if check:
        _check_conformity(tops, [s[0] for s in cell_lists[0]])
    bmats: list[np.ndarray | None] = [None]
    for j in range(1, dim + 1):
        B = np.zeros((len(cell_lists[j - 1]), len(cell_lists[j])))
        for col, s in enumerate(cell_lists[j]):
            for i in range(j + 1):
                B[index[j - 1][s[:i] + s[i + 1:]], col] = 1.0 if i % 2 == 0 else -1.0
        bmats.append(B)
    for j in range(2, dim + 1):
        if np.any(bmats[j - 1] @ bmats[j]):
            raise MeshConformityError("boundary of boundary is not zero")
    weights = tuple(simplex_volumes(list(cl)) for cl in cell_lists)
    if any((w <= 0).any() for w in weights):
        raise MeshConformityError("non-positive cell volume")
    return SimplicialComplex(d, dim, cell_lists, index, tuple(bmats), weights)


def complex_from_mesh(vertices: Sequence[Sequence[float]], cells: Sequence[Sequence[int]],
                      check: bool = True) -> SimplicialComplex:
    return build_complex([[vertices[i] for i in c] for c in cells], check=check)


@dataclass(frozen=True, eq=False)
class EmbeddedChain:
    complex: SimplicialComplex
    k: int
    coeffs: np.ndarray

    def to_chain(self) -> Chain:
        cells = self.complex.cells[self.k]
        items = [(list(cells[i]), float(c)) for i, c in enumerate(self.coeffs) if c != 0.0]
        if not items:
            return Chain(self.k, self.complex.d)
        return canonicalize(items, k=self.k, d=self.complex.d)

    def weighted_mass(self) -> float:
        return float(np.abs(self.coeffs) @ self.complex.weights[self.k])

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "coeffs": self.coeffs.tolist()}


def embed(T: Chain, X: SimplicialComplex) -> EmbeddedChain:
    """Coefficient vector of T over the k-cells of X."""
    if T.d != X.d or T.k > X.dim:
        raise DimensionMismatchError("chain does not fit the complex", chain=[T.k, T.d],
                                     complex=[X.dim, X.d])
    idx = X.index[T.k]
    out = np.zeros(len(X.cells[T.k]))
    for key, c in T.items():
        i = idx.get(key)
        if i is None:
            raise NotInComplexError("simplex is not a cell of the complex",
                                    simplex=[list(v) for v in key])
        out[i] += c
    return EmbeddedChain(X, T.k, out)


@dataclass
class FlatNormResult:
    value: float
    filling: EmbeddedChain | None
    residual: EmbeddedChain | None
    feasible: bool
    lp_stats: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        fill = self.filling.to_chain().to_json() if self.filling is not None else None
        res = self.residual.to_chain().to_json() if self.residual is not None else None
        return {
            "value": self.value if math.isfinite(self.value) else "inf",
            "feasible": self.feasible,
            "filling": fill,
            "residual": res,
            "lp_stats": self.lp_stats,
        }


def flat_norm(X: SimplicialComplex, t: EmbeddedChain, solver: LPSolver | None = None) -> FlatNormResult:
    """min over s of |t - B s|_w + |s|_w on X, by a sign-split LP."""
    k = t.k
    wk = X.weights[k]
    if k + 1 > X.dim:
        return FlatNormResult(t.weighted_mass(), None, EmbeddedChain(X, k, t.coeffs.copy()), True,
                              {"iterations": 0})
    B = X.boundary_matrix[k + 1]
    w1 = X.weights[k + 1]
    nk, n1 = B.shape
    I = np.eye(nk)
    A = np.hstack([B, -B, I, -I])
    c = np.concatenate([w1, w1, wk, wk])
    res = solve_lp(c, A, t.coeffs, solver)
    if res.status != "optimal":
        raise SolverError("flat norm LP did not reach optimality", status=res.status)
    x = res.x
    s = x[:n1] - x[n1:2 * n1]
    r = t.coeffs - B @ s
    value = float(np.abs(r) @ wk + np.abs(s) @ w1)
    stats = {"iterations": res.iterations, "objective": res.objective,
             "objective_gap": abs(value - res.objective), "dual_gap": res.dual_gap}
    return FlatNormResult(value, EmbeddedChain(X, k + 1, s), EmbeddedChain(X, k, r), True, stats)


def flat_norm_hom(X: SimplicialComplex, t: EmbeddedChain, solver: LPSolver | None = None,
                  cycle_tol: float = 1e-9) -> FlatNormResult:
    """min |s|_w subject to B s = t; value +inf when t is not a boundary in X."""
    k = t.k
    scale = max(1.0, float(np.abs(t.coeffs).max()) if t.coeffs.size else 1.0)
    if k >= 1:
        bt = X.boundary_matrix[k] @ t.coeffs
        if np.abs(bt).max(initial=0.0) > cycle_tol * scale:
            raise NotACycleError("homogeneous flat norm needs a cycle",
                                 boundary_max=float(np.abs(bt).max()))
    if not np.any(t.coeffs):
        z = np.zeros(X.n_cells(k + 1))
        return FlatNormResult(0.0, EmbeddedChain(X, k + 1, z), EmbeddedChain(X, k, t.coeffs * 0), True,
                              {"iterations": 0})
    if k + 1 > X.dim:
        return FlatNormResult(math.inf, None, None, False, {"phase1_objective": t.weighted_mass()})
    B = X.boundary_matrix[k + 1]
    w1 = X.weights[k + 1]
    n1 = B.shape[1]
    res = solve_lp(np.concatenate([w1, w1]), np.hstack([B, -B]), t.coeffs, solver)
    if res.status == "infeasible":
        return FlatNormResult(math.inf, None, None, False,
                              {"iterations": res.iterations, "phase1_objective": res.phase1_objective})
    if res.status != "optimal":
        raise SolverError("homogeneous flat norm LP failed", status=res.status)
    s = res.x[:n1] - res.x[n1:]
    value = float(np.abs(s) @ w1)
    r = t.coeffs - B @ s
    stats = {"iterations": res.iterations, "objective": res.objective,
             "objective_gap": abs(value - res.objective), "dual_gap": res.dual_gap,
             "residual_max": float(np.abs(r).max(initial=0.0))}
    return FlatNormResult(value, EmbeddedChain(X, k + 1, s), EmbeddedChain(X, k, r), True, stats)


def measured_hom_flat_constant(X: SimplicialComplex, cycles: Sequence[EmbeddedChain]) -> float:
    """Largest observed ratio F°/F over the given fillable cycles."""
    worst = 0.0
    for t in cycles:
        hom = flat_norm_hom(X, t)
        if not hom.feasible:
            continue
        flat = flat_norm(X, t).value
        if flat > 1e-12:
            worst = max(worst, hom.value / flat)
    return worst


def wasserstein1(sources: Sequence[tuple[Sequence[float], float]],
                 sinks: Sequence[tuple[Sequence[float], float]],
                 solver: LPSolver | None = None, rtol: float = 1e-9) -> float:
    """Optimal transport cost between balanced weighted point sets, Euclidean ground cost."""
    a = np.array([w for _, w in sources], dtype=float)
    b = np.array([w for _, w in sinks], dtype=float)
    if (a < 0).any() or (b < 0).any():
        raise BalanceError("weights must be nonnegative")
    if abs(a.sum() - b.sum()) > rtol * max(1.0, a.sum(), b.sum()):
        raise BalanceError("source and sink masses differ", sources=float(a.sum()), sinks=float(b.sum()))
    if a.sum() == 0.0:
        return 0.0
    X = np.array([p for p, _ in sources], dtype=float)
    Y = np.array([p for p, _ in sinks], dtype=float)
    if X.ndim == 1:
        X, Y = X[:, None], Y[:, None]
    n, m = len(a), len(b)
    cost = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2).ravel()
    A = np.zeros((n + m, n * m))
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A[n + j, j::m] = 1.0
    res = solve_lp(cost, A, np.concatenate([a, b]), solver)
    if res.status != "optimal":
        raise SolverError("transport LP failed", status=res.status)
    return float(res.objective)
