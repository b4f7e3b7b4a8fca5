"""Acceptance criteria 1-11, one test each, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from conftest import random_chain, random_polygon_loop
from polycurrents.chains import (
    affine_pushforward,
    boundary,
    canonicalize,
    interval_product,
    mass,
    simplex_norms,
    time_slice_embed,
)
from polycurrents.complex import embed, flat_norm, flat_norm_hom, wasserstein1
from polycurrents.domain import (
    contraction_map,
    direction_field,
    l_shape,
    no_retraction_witness,
    square_annulus,
    unit_square,
    verify_field,
)
from polycurrents.gridflow import dynamical_deform
from polycurrents.meshes import (
    annulus_generator,
    annulus_mesh,
    dirac,
    disk_mesh,
    interval_mesh,
    segment_mesh,
    shrinking_loops,
)
from polycurrents.pipeline import connectivity_run, deformation_distance_bounds
from polycurrents.spacetime import (
    PLMap,
    coarea_check,
    concatenate,
    cone,
    linfty,
    lipschitz_estimate,
    normalize_speed,
    reparameterize,
    reverse,
    spatial_projection,
    stretch,
    variation,
)


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def random_trajectory(rng: np.random.Generator):
    kind = rng.integers(0, 3)
    loop = random_polygon_loop(rng, int(rng.integers(3, 7)), tuple(rng.uniform(-1, 1, 2)))
    if kind == 0:
        return cone(loop, rng.normal(size=2) * 0.3)
    if kind == 1:
        return stretch(random_chain(rng, 2, 2, 3))
    return concatenate(cone(loop, (0.0, 0.0)), reverse(cone(loop * 0.5, (0.0, 0.0))))


def test_criterion_01_interval_flat_norms(report):
    t0 = time.perf_counter()
    X = interval_mesh()
    t = embed(dirac([((2.0,), 1.0), ((-2.0,), -1.0)]), X)
    hom, flat = flat_norm_hom(X, t).value, flat_norm(X, t).value
    dt = time.perf_counter() - t0
    ok = abs(hom - 4) <= 1e-8 and abs(flat - 2) <= 1e-8 and dt < 1
    report(1, ok, f"F_hom={hom!r} F={flat!r} time={dt:.3f}s")


def test_criterion_02_annulus_obstruction(report):
    t0 = time.perf_counter()
    X = annulus_mesh()
    results = [flat_norm_hom(X, embed(annulus_generator() * (1.0 / j), X)) for j in range(1, 11)]
    dt = time.perf_counter() - t0
    ok = len(X.cells[2]) == 16 and all(not r.feasible for r in results) and dt < 1
    report(2, ok, f"infeasible={sum(not r.feasible for r in results)}/10 time={dt:.3f}s")


def test_criterion_03_chain_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    dims = [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]
    fails = 0
    for i in range(100):
        k, d = dims[i % len(dims)]
        T = random_chain(rng, k, d, 4)
        # the boundary of a 0-chain is undefined, so the square is taken one degree up
        kk, dd = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)][i % 5]
        fails += not boundary(boundary(random_chain(rng, kk, dd, 4))).is_zero()
        A, b = rng.normal(size=(d, d)), rng.normal(size=d)
        fails += boundary(affine_pushforward(T, A, b)) != affine_pushforward(boundary(T), A, b)
        a = float(rng.uniform(-2, 0))
        c = a + float(rng.uniform(0.1, 2))
        rhs = time_slice_embed(c, T) - time_slice_embed(a, T) - interval_product(a, c, boundary(T))
        fails += boundary(interval_product(a, c, T)) != rhs
    dt = time.perf_counter() - t0
    report(3, fails == 0 and dt < 5, f"failures={fails}/300 time={dt:.3f}s")


def test_criterion_04_pythagoras_coarea(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_pyth = worst_coarea = 0.0
    for _ in range(50):
        S = random_trajectory(rng)
        e, s, t = simplex_norms(list(S.chain))
        worst_pyth = max(worst_pyth, float(np.max(np.abs((s**2 + t**2) / e**2 - 1))))
        lhs, rhs = coarea_check(S)
        worst_coarea = max(worst_coarea, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    dt = time.perf_counter() - t0
    ok = worst_pyth <= 1e-12 and worst_coarea <= 1e-6 and dt < 10
    report(4, ok, f"pythagoras_rel={worst_pyth:.2e} coarea_rel={worst_coarea:.2e} time={dt:.3f}s")


def test_criterion_05_cone_stretch(report):
    rng = np.random.default_rng(5)
    worst_cone = worst_stretch = 0.0
    exact = True
    for i in range(50):
        loop = random_polygon_loop(rng, int(rng.integers(3, 8)), tuple(rng.uniform(-1, 1, 2)))
        C = cone(loop, tuple(rng.normal(size=2)))
        worst_cone = max(worst_cone, abs(variation(C) - mass(spatial_projection(C))))
        P = random_chain(rng, 2, 2, 1 + i % 4)
        S = stretch(P)
        worst_stretch = max(worst_stretch, abs(variation(S) - mass(P)))
        exact &= boundary(S.chain) == -time_slice_embed(0.0, boundary(P))
    ok = worst_cone <= 1e-9 and worst_stretch <= 1e-9 and exact
    report(5, ok, f"cone_err={worst_cone:.2e} stretch_err={worst_stretch:.2e} boundary_exact={exact}")


def test_criterion_06_trajectory_calculus(report):
    rng = np.random.default_rng(6)
    errs = {"additivity": 0.0, "linfty_max": 0.0, "reverse": 0.0, "reparam": 0.0}
    speed_ok = True
    for _ in range(10):
        loop = random_polygon_loop(rng, 5, tuple(rng.uniform(-1, 1, 2)))
        S1 = cone(loop, tuple(rng.normal(size=2) * 0.2))
        S2 = reverse(cone(loop, tuple(rng.normal(size=2) * 0.2)))
        S = concatenate(S1, S2)
        v1, v2 = variation(S1), variation(S2)
        errs["additivity"] = max(errs["additivity"], abs(variation(S) - v1 - v2) / (v1 + v2))
        l = max(linfty(S1)[0], linfty(S2)[0])
        errs["linfty_max"] = max(errs["linfty_max"], abs(linfty(S)[0] - l) / l)
        errs["reverse"] = max(errs["reverse"], abs(variation(reverse(S)) - variation(S)))
        a = PLMap.from_function(lambda t: t ** 3, 6)
        errs["reparam"] = max(errs["reparam"], abs(variation(reparameterize(S, a)) - variation(S)))
        speed_ok &= lipschitz_estimate(normalize_speed(S)) <= variation(S) * (1 + 1e-6)
    ok = (errs["additivity"] <= 1e-12 and errs["linfty_max"] <= 1e-12 and errs["reverse"] <= 1e-9
          and errs["reparam"] <= 1e-9 and speed_ok)
    detail = " ".join(f"{k}={v:.2e}" for k, v in errs.items())
    report(6, ok, f"{detail} normalize_speed_ok={speed_ok}")


def test_criterion_07_deformation_suite(report):
    rng = np.random.default_rng(7)
    bad = []
    for case in range(20):
        eps = float(rng.choice([0.25, 0.5, 1.0]))
        if case < 10:
            n = int(rng.integers(1, 5))
            T = dirac([(tuple(rng.uniform(-2, 2, 2)), float(rng.choice([-1, 1]) * rng.uniform(0.5, 2)))
                       for _ in range(n)])
        else:
            T = random_polygon_loop(rng, 6, tuple(rng.uniform(-1, 1, 2)), float(rng.uniform(0.3, 1.5)))
        gammas = []
        for depth in (2, 3):
            res = dynamical_deform(T, eps, seed=case, depth=depth)
            d = res.diagnostics
            if not (d["defect"] <= 1e-6 * mass(T) and d["support_radius"] <= 2 * 2 * eps
                    and d["boundary_exact"]):
                bad.append((case, depth))
            gammas.append(max(d["ratio_P"], d["ratio_R"], d["ratio_var"]))
        if not (math.isfinite(gammas[0]) and abs(gammas[1] - gammas[0]) <= 0.2 * gammas[0]):
            bad.append((case, "gamma", gammas))
    report(7, not bad, f"cases=20 failures={bad}")


def test_criterion_08_connectivity(report):
    t0 = time.perf_counter()
    X = disk_mesh()
    run = connectivity_run(X, boundary(canonicalize([], k=2, d=2)), shrinking_loops(8))
    dt = time.perf_counter() - t0
    v = [r.var for r in run.records]
    ok = (all(a > b for a, b in zip(v, v[1:])) and v[-1] < 0.1 * v[0]
          and all(r.mass_R <= r.var * (1 + 1e-9) for r in run.records)
          and all(r.boundary_exact for r in run.records) and dt < 60)
    report(8, ok, f"var={[round(x, 4) for x in v]} time={dt:.2f}s")


def test_criterion_09_wasserstein(report):
    n, lo, hi = 200, -1.0, 1.0
    h = (hi - lo) / n
    X = segment_mesh(n, lo, hi)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(5):
        k = int(rng.integers(2, 6))
        src = list(zip(rng.uniform(lo, hi, k), rng.dirichlet(np.ones(k))))
        snk = list(zip(rng.uniform(lo, hi, k + 1), rng.dirichlet(np.ones(k + 1))))
        w = wasserstein1([((x,), m) for x, m in src], [((x,), m) for x, m in snk])
        # the mesh only carries vertex masses: round each point to its nearest vertex
        snap = lambda x: lo + h * round((x - lo) / h)
        T = dirac([((snap(x),), m) for x, m in src] + [((snap(x),), -m) for x, m in snk])
        f = flat_norm_hom(X, embed(T, X)).value
        worst = max(worst, abs(f - w))
    report(9, worst <= 2 * h, f"max|F_hom - W1|={worst:.2e} bound={2 * h:.2e}")


def test_criterion_10_equality_trend(report):
    X = disk_mesh()
    tris = X.cells[2]
    rng = np.random.default_rng(10)

    def fillable_cycle():
        pick = rng.choice(len(tris), size=int(rng.integers(1, 6)), replace=False)
        return boundary(canonicalize([(list(tris[i]), 1.0) for i in pick]))

    rows = []
    for case in range(5):
        A, B = fillable_cycle(), fillable_cycle()
        gaps = []
        for eps in (0.4, 0.2, 0.1):
            lower, upper = deformation_distance_bounds(A, B, X, eps, seed=case)
            gaps.append(upper - lower)
        rows.append([round(g, 4) for g in gaps])
    mono = [g[0] > g[1] > g[2] for g in rows]
    report(10, all(mono), f"gaps={rows} monotone={sum(mono)}/5")


def test_criterion_11_domain_suite(report):
    notes = []
    for name, make in (("square", unit_square), ("lshape", l_shape), ("annulus", square_annulus)):
        omega = make()
        F = direction_field(omega)
        rep = verify_field(F, n_points=1000, n_depths=16)
        f = contraction_map(omega, 0.1, F, n_pairs=4000)
        rng = np.random.default_rng(11)
        pts = np.vstack([omega.sample_boundary(500, rng), omega.sample_closure(500, rng)])
        inside = bool(omega.contains(f(pts)).all())
        if not (rep["passed"] and f.lipschitz <= 1.1 and inside):
            notes.append(name)
    lens = {L: no_retraction_witness(L, 0.1) for L in (1.0, 1.2, 1.41, 1.5, 2.0)}
    lens_ok = all(lens[L] for L in (1.0, 1.2, 1.41)) and not any(lens[L] for L in (1.5, 2.0))
    report(11, not notes and lens_ok, f"domain_failures={notes} lens={lens}")
