"""Trajectories between cycles through skeletal approximations, and connectivity runs."""

from __future__ import annotations

import csv
import io
import math
import platform
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .chains import Chain, Point, boundary, mass, time_slice_embed
from .complex import EmbeddedChain, SimplicialComplex, build_complex, embed, flat_norm, flat_norm_hom
from .errors import HomologyObstructionError, UnsupportedError
from .gridflow import GridSpec, choose_shift, dynamical_deform
from .lp import LPSolver
from .spacetime import (
    SpaceTimeChain,
    TrajectoryReport,
    concatenate,
    reverse,
    spatial_projection,
    static,
    stretch,
    trajectory_report,
    zero_trajectory,
)


def _abs_union(T0: Chain, T1: Chain) -> Chain:
    terms: dict = {}
    for T in (T0, T1):
        for key, c in T.items():
            terms[key] = terms.get(key, 0.0) + abs(c)
    return Chain(T0.k, T0.d, terms)


def _cell_fan(z: Sequence[int], extra: Sequence[Point]) -> list[list[Point]]:
    """Fan triangulation of the square W'(z) (grid units) from its centre over its boundary points."""
    cx, cy = float(z[0]), float(z[1])
    pts = {(cx + sx, cy + sy) for sx in (-1.0, 1.0) for sy in (-1.0, 1.0)}
    for p in extra:
        if abs(p[0] - cx) <= 1.0 and abs(p[1] - cy) <= 1.0 and (abs(p[0] - cx) == 1.0 or abs(p[1] - cy) == 1.0):
            pts.add(p)
    ring = sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    return [[(cx, cy), ring[i], ring[(i + 1) % len(ring)]] for i in range(len(ring))]


def grid_filling_complex(g: GridSpec, points: dict[Point, Point],
                         support: Sequence[Point] | None = None) -> SimplicialComplex:
    """Grid cells of W'_d covering the support (default: all points), triangulated conformingly.

    points maps grid coordinates to the world coordinates used by the chains
    that will be embedded, so shared vertices agree exactly.
    """
    if not points:
        raise UnsupportedError("no points to cover")
    Y = np.asarray(list(support) if support else list(points), dtype=float)
    lo, hi = Y.min(axis=0), Y.max(axis=0)

    def world(y: Point) -> Point:
        w = points.get(y)
        return w if w is not None else g.to_world(y)

    def even_range(a: float, b: float) -> range:
        start = 2 * math.ceil((a - 1.0) / 2.0)
        stop = 2 * math.floor((b + 1.0) / 2.0)
        return range(start, stop + 1, 2)

    cells: list[list[Point]] = []
    if g.d == 1:
        for z in even_range(lo[0], hi[0]):
            cells.append([world((z - 1.0,)), world((z + 1.0,))])
    elif g.d == 2:
        extra = list(points)
        for zx in even_range(lo[0], hi[0]):
            for zy in even_range(lo[1], hi[1]):
                for tri in _cell_fan((zx, zy), extra):
                    cells.append([world(p) for p in tri])
    else:
        raise UnsupportedError("grid filling is implemented for d <= 2", d=g.d)
    return build_complex(cells, check=False)


def grid_filling(G: SimplicialComplex, t: EmbeddedChain, solver: LPSolver | None = None) -> Chain:
    """The filling of a cycle on a grid complex.

    A complex of top-dimensional cells in R^d carries no d-cycles, so its top
    boundary matrix is injective and the filling with ∂Y = t is unique; a
    least-squares solve finds it. Other complexes go through the LP.
    """
    B = G.boundary_matrix[t.k + 1]
    if G.dim == G.d == t.k + 1:
        s, *_ = np.linalg.lstsq(B, t.coeffs, rcond=None)
        resid = float(np.abs(B @ s - t.coeffs).max(initial=0.0))
        if resid > 1e-9 * max(1.0, float(np.abs(t.coeffs).max(initial=0.0))):
            raise HomologyObstructionError("skeletal endpoints bound nothing on the grid", residual=resid)
        return EmbeddedChain(G, t.k + 1, s).to_chain()
    fill = flat_norm_hom(G, t, solver)
    if not fill.feasible:
        raise HomologyObstructionError("skeletal endpoints bound nothing on the grid",
                                       phase1_objective=fill.lp_stats.get("phase1_objective"))
    return fill.filling.to_chain()


@dataclass
class TrajectoryBuild:
    S: SpaceTimeChain
    report: TrajectoryReport
    flat_hom: float
    filling_mass: float
    epsilon: float
    shift: tuple[float, ...]
    boundary_exact: bool
    deform_diagnostics: tuple[dict, dict] = field(default_factory=lambda: ({}, {}))


def build_trajectory_full(T0: Chain, T1: Chain, X: SimplicialComplex, epsilon: float, seed: int = 0,
                          depth: int = 2, solver: LPSolver | None = None, m: int = 16) -> TrajectoryBuild:
    """S = S1⁻¹ ∘ V ∘ S0 with ∂S = δ_1 × T1 − δ_0 × T0."""
    if (T0.k, T0.d) != (T1.k, T1.d):
        raise UnsupportedError("endpoints differ in dimension")
    k, d = T0.k, T0.d
    diff = embed(T1 - T0, X)
    hom = flat_norm_hom(X, diff, solver)
    if not hom.feasible:
        raise HomologyObstructionError("T1 - T0 bounds nothing in the complex",
                                       phase1_objective=hom.lp_stats.get("phase1_objective"))
    union = _abs_union(T0, T1)
    if union.is_zero():
        S = zero_trajectory(k, d)
        rep = trajectory_report(S, m)
        return TrajectoryBuild(S, rep, hom.value, 0.0, epsilon, (0.0,) * d, True)
    shift = choose_shift(union, GridSpec(float(epsilon), (0.0,) * d, d, k), seed=seed)
    first = [dynamical_deform(T, epsilon, shift, depth=depth, with_profile=False) for T in (T0, T1)]
    shared: dict[Point, Point] = {}
    for r in first:
        shared.update(r.grid_points)
    r0, r1 = (dynamical_deform(T, epsilon, shift, depth=depth, refine_with=shared, with_profile=False)
              for T in (T0, T1))
    P0, P1 = r0.P, r1.P
    g = r0.grid
    Y = Chain(k + 1, d)
    if not (P1 - P0).is_zero():
        pts = dict(shared)
        pts.update(r0.grid_points)
        pts.update(r1.grid_points)
        # the cells over the bounding box of P1 - P0 already carry its filling
        inv = {w: y for y, w in pts.items()}
        G = grid_filling_complex(g, pts, [inv[v] for key in (P1 - P0) for v in key])
        Y = grid_filling(G, embed(P1 - P0, G), solver)
    V = static(P1)
    if not Y.is_zero():
        V = stretch(-Y) + V
    S = concatenate(concatenate(r0.S, V), reverse(r1.S))
    target = time_slice_embed(1.0, T1) - time_slice_embed(0.0, T0)
    exact = bool(boundary(S.chain) == target)
    rep = trajectory_report(S, m)
    rep.constants.update({
        "flat_hom": hom.value,
        "filling_mass": mass(Y),
        "epsilon": float(epsilon),
        "mass_R": mass(spatial_projection(S)),
        "boundary_exact": exact,
    })
    return TrajectoryBuild(S, rep, hom.value, mass(Y), float(epsilon), tuple(shift), exact,
                           (r0.diagnostics, r1.diagnostics))


def build_trajectory(T0: Chain, T1: Chain, X: SimplicialComplex, epsilon: float, seed: int = 0,
                     depth: int = 2, solver: LPSolver | None = None) -> tuple[SpaceTimeChain, TrajectoryReport]:
    b = build_trajectory_full(T0, T1, X, epsilon, seed, depth, solver)
    return b.S, b.report


def deformation_distance_bounds(T0: Chain, T1: Chain, X: SimplicialComplex, epsilon: float,
                                seed: int = 0, solver: LPSolver | None = None) -> tuple[float, float]:
    """(F°(T1 − T0), Var of the constructed trajectory)."""
    b = build_trajectory_full(T0, T1, X, epsilon, seed, solver=solver)
    return b.flat_hom, b.report.var


# ---------------------------------------------------------------------------
# connectivity runs


@dataclass
class StepRecord:
    j: int
    flat: float
    flat_hom: float
    obstructed: bool
    epsilon: float | None = None
    var: float | None = None
    linfty: float | None = None
    mass_R: float | None = None
    mass_Tj: float = 0.0
    boundary_exact: bool | None = None
    lip: float | None = None
    phase1_objective: float | None = None
    S: SpaceTimeChain | None = None

    def to_json(self) -> dict[str, Any]:
        out = {
            "j": self.j,
            "flat": self.flat,
            "flat_hom": self.flat_hom if math.isfinite(self.flat_hom) else "inf",
            "obstructed": self.obstructed,
            "epsilon": self.epsilon,
            "var": self.var,
            "linfty": self.linfty,
            "mass_R": self.mass_R,
            "mass_Tj": self.mass_Tj,
            "boundary_exact": self.boundary_exact,
            "lip": self.lip,
        }
        if self.obstructed:
            out["phase1_objective"] = self.phase1_objective
        return out


@dataclass
class ConnectivityRun:
    complex: SimplicialComplex
    limit: Chain
    sequence: list[Chain]
    records: list[StepRecord]
    seed: int
    epsilon0: float
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "flat", "flat_hom", "var", "linfty", "mass_R"])
        for r in self.records:
            w.writerow([r.j, repr(r.flat), "inf" if not math.isfinite(r.flat_hom) else repr(r.flat_hom),
                        "" if r.var is None else repr(r.var),
                        "" if r.linfty is None else repr(r.linfty),
                        "" if r.mass_R is None else repr(r.mass_R)])
        return buf.getvalue()

    def to_json(self) -> dict[str, Any]:
        return {"records": [r.to_json() for r in self.records], "summary": self.summary}

    def manifest(self) -> dict[str, Any]:
        return {
            "package": "polycurrents",
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "seed": self.seed,
            "epsilon0": self.epsilon0,
            "epsilon_schedule": "min(epsilon0, sqrt(flat_hom))",
            "tolerances": {
                "coefficient_rtol": 1e-12,
                "lp_tol": 1e-9,
                "profile_samples": 16,
                "profile_offset": 1e-7,
            },
            "n_steps": len(self.records),
        }


def default_schedule(epsilon0: float) -> Callable[[int, float], float]:
    def schedule(j: int, flat_hom: float) -> float:
        if flat_hom > 0 and math.isfinite(flat_hom):
            return min(epsilon0, math.sqrt(flat_hom))
        return epsilon0
    return schedule


def connectivity_run(X: SimplicialComplex, T: Chain, sequence: Sequence[Chain],
                     epsilon_schedule: Callable[[int, float], float] | None = None, epsilon0: float = 1.0,
                     seed: int = 0, depth: int = 2, solver: LPSolver | None = None,
                     keep_trajectories: bool = False, var_threshold: float | None = None) -> ConnectivityRun:
    """Build S_j from T_j to T for every j; obstructed steps are recorded and skipped."""
    schedule = epsilon_schedule or default_schedule(epsilon0)
    records = []
    for j, Tj in enumerate(sequence, start=1):
        D = embed(T - Tj, X)
        flat = flat_norm(X, D, solver).value
        hom = flat_norm_hom(X, D, solver)
        rec = StepRecord(j, flat, hom.value, not hom.feasible, mass_Tj=mass(Tj))
        if not hom.feasible:
            rec.phase1_objective = hom.lp_stats.get("phase1_objective")
            records.append(rec)
            continue
        eps = float(schedule(j, hom.value))
        try:
            b = build_trajectory_full(Tj, T, X, eps, seed, depth, solver)
        except HomologyObstructionError as err:
            rec.obstructed = True
            rec.phase1_objective = err.details.get("phase1_objective")
            records.append(rec)
            continue
        rec.epsilon = eps
        rec.var = b.report.var
        rec.linfty = b.report.linfty
        rec.lip = b.report.lip
        rec.mass_R = b.report.constants["mass_R"]
        rec.boundary_exact = b.boundary_exact
        if keep_trajectories:
            rec.S = b.S
        records.append(rec)
    run = ConnectivityRun(X, T, list(sequence), records, seed, epsilon0)
    run.summary = summarize(records, var_threshold)
    return run


def summarize(records: Sequence[StepRecord], var_threshold: float | None = None) -> dict[str, Any]:
    done = [r for r in records if not r.obstructed]
    out: dict[str, Any] = {
        "steps": len(records),
        "obstructed": [r.j for r in records if r.obstructed],
    }
    if not done:
        out["verdict"] = "all steps obstructed" if records else "empty"
        return out
    vars_ = [r.var for r in done]
    out["var_strictly_decreasing"] = all(b < a for a, b in zip(vars_[:-1], vars_[1:]))
    out["mass_R_le_var"] = all(r.mass_R <= r.var * (1 + 1e-9) + 1e-12 for r in done)
    out["boundaries_exact"] = all(bool(r.boundary_exact) for r in done)
    tail = [r.mass_Tj for r in records[len(records) // 2:]]
    limsup = max(tail) if tail else 0.0
    linf = max(r.linfty for r in done)
    out["limsup_mass"] = limsup
    out["measured_C"] = linf / limsup if limsup > 0 else None
    out["var_first"] = vars_[0]
    out["var_last"] = vars_[-1]
    if var_threshold is not None:
        out["var_below_threshold"] = vars_[-1] < var_threshold
    return out


def load_sequence(data: Any) -> tuple[Chain | None, list[Chain]]:
    """Parse {"limit": chain | null, "chains": [...]} or a bare list of chains."""
    if isinstance(data, list):
        return None, [Chain.from_json(c) for c in data]
    limit = data.get("limit")
    return (Chain.from_json(limit) if limit else None), [Chain.from_json(c) for c in data["chains"]]
