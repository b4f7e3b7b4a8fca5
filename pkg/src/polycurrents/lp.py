"""A small dense revised simplex solver for equality-form linear programs.

Solves  min c.x  subject to  A x = b, x >= 0.

Phase 1 minimizes the sum of artificial variables; a positive optimum is the
infeasibility certificate. Pricing is Dantzig's most-negative reduced cost;
after a run of degenerate pivots the solver switches to Bland's
smallest-index rule until progress resumes, which rules out cycling.
The basis inverse is kept explicitly and refactored periodically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import SolverError


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    objective: float
    iterations: int = 0
    phase1_objective: float = 0.0
    dual_gap: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


class LPSolver(Protocol):
    def solve(self, c: np.ndarray, A: np.ndarray, b: np.ndarray) -> LPResult: ...


class RevisedSimplex:
    """Revised simplex with an explicit dense basis inverse."""

    def __init__(self, tol: float = 1e-9, max_iter: int = 200_000,
                 refactor_every: int = 64, degenerate_limit: int = 50) -> None:
        self.tol = tol
        self.max_iter = max_iter
        self.refactor_every = refactor_every
        self.degenerate_limit = degenerate_limit

    def _run(self, c, A, b, basis, Binv, xB, allowed, it0):
        tol = self.tol
        it = it0
        streak = 0
        bland = False
        cscale = max(1.0, float(np.abs(c).max()) if c.size else 1.0)
        dtol = tol * cscale
        while True:
            if it - it0 > self.max_iter:
                raise SolverError("iteration limit reached", iterations=it)
            if (it - it0) % self.refactor_every == 0 and it > it0:
                Binv = np.linalg.inv(A[:, basis])
                xB = Binv @ b
                xB[np.abs(xB) < 1e-13] = 0.0
            y = c[basis] @ Binv
            d = c - y @ A
            d[basis] = 0.0
            d[~allowed] = 0.0
            if bland:
                cand = np.flatnonzero(d < -dtol)
                if cand.size == 0:
                    return "optimal", basis, Binv, xB, it, y
                e = int(cand[0])
            else:
                e = int(np.argmin(d))
                if d[e] >= -dtol:
                    return "optimal", basis, Binv, xB, it, y
            col = Binv @ A[:, e]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return "unbounded", basis, Binv, xB, it, y
            ratios = np.maximum(xB[rows], 0.0) / col[rows]
            theta = float(ratios.min())
            ties = rows[ratios <= theta + tol * max(1.0, theta)]
            r = int(min(ties, key=lambda i: basis[i]))
            theta = max(float(xB[r]), 0.0) / col[r]
            xB = xB - theta * col
            xB[r] = theta
            xB[np.abs(xB) < 1e-13] = 0.0
            piv = Binv[r] / col[r]
            col_r = col.copy()
            col_r[r] = 0.0
            Binv = Binv - np.outer(col_r, piv)
            Binv[r] = piv
            basis[r] = e
            it += 1
            if theta <= tol:
                streak += 1
                if streak > self.degenerate_limit:
                    bland = True
            else:
                streak = 0
                bland = False

    def solve(self, c, A, b) -> LPResult:
        c = np.asarray(c, dtype=float)
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).copy()
        m, n = A.shape
        if m == 0:
            if np.any(c < -self.tol):
                return LPResult("unbounded", None, -np.inf)
            return LPResult("optimal", np.zeros(n), 0.0)
        flip = b < 0
        A = A.copy()
        A[flip] *= -1.0
        b[flip] *= -1.0
        A1 = np.hstack([A, np.eye(m)])
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis = list(range(n, n + m))
        Binv = np.eye(m)
        xB = b.copy()
        allowed = np.ones(n + m, dtype=bool)
        status, basis, Binv, xB, it, _ = self._run(c1, A1, b, basis, Binv, xB, allowed, 0)
        phase1 = float(sum(xB[i] for i, v in enumerate(basis) if v >= n))
        bscale = max(1.0, float(np.abs(b).max()))
        if phase1 > 1e3 * self.tol * bscale:
            return LPResult("infeasible", None, np.inf, it, phase1)
        # pivot artificials out where possible; rows where this fails are redundant
        for r in range(m):
            if basis[r] < n:
                continue
            row = Binv[r] @ A
            row[[v for v in basis if v < n]] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-7:
                col = Binv @ A1[:, j]
                piv = Binv[r] / col[r]
                col_r = col.copy()
                col_r[r] = 0.0
                Binv = Binv - np.outer(col_r, piv)
                Binv[r] = piv
                theta = xB[r] / col[r]
                xB = xB - theta * col
                xB[r] = theta
                basis[r] = j
        allowed = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
        c2 = np.concatenate([c, np.zeros(m)])
        status, basis, Binv, xB, it, y = self._run(c2, A1, b, basis, Binv, xB, allowed, it)
        if status == "unbounded":
            return LPResult("unbounded", None, -np.inf, it, phase1)
        x = np.zeros(n + m)
        x[basis] = np.maximum(xB, 0.0)
        obj = float(c @ x[:n])
        dual = float(y @ b)
        return LPResult("optimal", x[:n], obj, it, phase1, abs(obj - dual),
                        {"iterations": it, "rows": m, "cols": n})


DEFAULT_SOLVER: LPSolver = RevisedSimplex()


def solve_lp(c, A, b, solver: LPSolver | None = None) -> LPResult:
    """Solve min c.x s.t. A x = b, x >= 0 with the given (or default) solver."""
    return (solver or DEFAULT_SOLVER).solve(c, A, b)
