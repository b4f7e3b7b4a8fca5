import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_chain, same_current
from polycurrents.chains import (
    Chain,
    MultiVector,
    affine_pushforward,
    boundary,
    canonicalize,
    collinear_normal_form,
    interval_product,
    is_degenerate,
    mass,
    restrict_halfspace,
    simple_norms,
    simplex_norms,
    time_slice_embed,
)
from polycurrents.errors import DimensionMismatchError, InvalidHyperplaneError, UndefinedBoundaryError

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)])


def test_triangle_boundary():
    T = Chain.simplex([(0, 0), (1, 0), (0, 1)])
    expected = canonicalize([
        ([(1, 0), (0, 1)], 1.0),
        ([(0, 0), (0, 1)], -1.0),
        ([(0, 0), (1, 0)], 1.0),
    ])
    assert boundary(T) == expected
    assert len(boundary(T)) == 3


def test_reordering_folds_sign():
    a = Chain.simplex([(0, 0), (1, 0), (0, 1)])
    b = Chain.simplex([(1, 0), (0, 0), (0, 1)])
    assert a == -b
    assert (a + b).is_zero()


def test_duplicates_merge_and_cancel():
    T = canonicalize([([(0,), (1,)], 2.0), ([(1,), (0,)], 2.0)])
    assert T.is_zero()
    T = canonicalize([([(0,), (1,)], 2.0), ([(0,), (1,)], 0.5)])
    assert T[((0.0,), (1.0,))] == 2.5


def test_degenerate_simplices_dropped():
    T = canonicalize([([(0, 0), (1, 1), (2, 2)], 1.0), ([(0, 0), (1, 0), (0, 1)], 1.0)])
    assert len(T) == 1
    assert is_degenerate(((0.0, 0.0), (0.0, 0.0)))


def test_tiny_coefficients_removed():
    T = canonicalize([([(0,), (1,)], 1.0), ([(2,), (3,)], 1e-14)])
    assert len(T) == 1


def test_affine_pushforward_examples():
    tri = Chain.simplex([(0, 0), (1, 0), (0, 1)])
    assert affine_pushforward(tri, np.eye(2)) == tri
    assert affine_pushforward(tri, [[1, 1], [1, 1]]).is_zero()
    S = Chain.simplex([(0, 0, 0), (0, 1, 0), (1, 0.5, 0.5)])
    p = affine_pushforward(S, [[0, 1, 0], [0, 0, 1]])
    assert p == Chain.simplex([(0, 0), (1, 0), (0.5, 0.5)])


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(-3, 3))
def test_mass_homogeneous(seed, c):
    T = random_chain(np.random.default_rng(seed), 2, 3, 3)
    assert mass(c * T) == pytest.approx(abs(c) * mass(T), rel=1e-12, abs=1e-300)


def test_mass_examples():
    assert mass(Chain.simplex([(0, 0), (1, 0), (0, 1)])) == pytest.approx(0.5, abs=1e-15)
    assert mass(Chain.simplex([(0, 0, 0), (3, 4, 0)], -2.0)) == pytest.approx(10.0, abs=1e-14)
    tet = Chain.simplex([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert mass(tet) == pytest.approx(1 / 6, abs=1e-15)
    assert mass(Chain.zero(1, 2)) == 0.0


def test_zero_chain_boundary_undefined():
    with pytest.raises(UndefinedBoundaryError):
        boundary(Chain.simplex([(0.0, 1.0)]))


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatchError):
        canonicalize([([(0, 0), (1, 0)], 1.0), ([(0, 0, 0), (1, 0, 0)], 1.0)])
    with pytest.raises(DimensionMismatchError):
        Chain.simplex([(0, 0), (1, 0)]) + Chain.simplex([(0, 0), (1, 0), (0, 1)])


def test_json_roundtrip(rng):
    T = random_chain(rng, 2, 3, 5)
    back = Chain.from_json(json.loads(json.dumps(T.to_json())))
    assert back == T and back.terms == T.terms


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]))
def test_boundary_of_boundary_is_zero(seed, kd):
    k, d = kd
    T = random_chain(np.random.default_rng(seed), k, d, 5)
    assert boundary(boundary(T)).is_zero()


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_pushforward_commutes_with_boundary(seed, kd):
    k, d = kd
    rng = np.random.default_rng(seed)
    T = random_chain(rng, k, d, 4)
    A = rng.normal(size=(d, d))
    b = rng.normal(size=d)
    assert boundary(affine_pushforward(T, A, b)) == affine_pushforward(boundary(T), A, b)


@settings(max_examples=60, deadline=None)
@given(seeds, dims, st.floats(-2, 0), st.floats(0.1, 2))
def test_prism_boundary_identity(seed, kd, a, length):
    k, d = kd
    b = a + length
    T = random_chain(np.random.default_rng(seed), k, d, 4)
    lhs = boundary(interval_product(a, b, T))
    rhs = time_slice_embed(b, T) - time_slice_embed(a, T) - interval_product(a, b, boundary(T))
    assert lhs == rhs


def test_prism_of_point_and_segment():
    P = interval_product(0.0, 1.0, Chain.simplex([(0.0,)]))
    assert P == Chain.simplex([(0.0, 0.0), (1.0, 0.0)])
    seg = Chain.simplex([(0.0,), (1.0,)])
    sq = interval_product(0.0, 1.0, seg)
    assert mass(sq) == pytest.approx(1.0)
    # sign convention fixed by the boundary identity above
    expected = canonicalize([([(0, 0), (1, 0), (1, 1)], 1.0), ([(0, 0), (0, 1), (1, 1)], -1.0)])
    assert sq == expected


@settings(max_examples=40, deadline=None)
@given(seeds, dims, st.floats(-1, 1))
def test_halfspace_split_preserves_mass(seed, kd, c):
    k, d = kd
    rng = np.random.default_rng(seed)
    T = random_chain(rng, k, d, 1)
    n = rng.normal(size=d)
    lo = restrict_halfspace(T, n, c, "<=", strict=True)
    hi = restrict_halfspace(T, n, c, ">=")
    # one simplex, so no cancellation between the two sides
    assert mass(lo) + mass(hi) == pytest.approx(mass(T), rel=1e-9, abs=1e-12)
    U = random_chain(rng, k, d, 4)
    assert same_current(restrict_halfspace(U, n, c, "<=", strict=True) + restrict_halfspace(U, n, c, ">="), U)


def test_halfspace_examples():
    seg = Chain.simplex([(-1, 0), (1, 0)])
    assert restrict_halfspace(seg, (1, 0), 0.0) == Chain.simplex([(-1, 0), (0, 0)])
    tri = Chain.simplex([(0, 0), (1, 0), (0, 1)])
    assert restrict_halfspace(tri, (1, 1), 5.0) == tri
    lo = restrict_halfspace(tri, (1, 0), 0.5)
    hi = restrict_halfspace(tri, (1, 0), 0.5, ">=")
    assert mass(lo) == pytest.approx(0.375) and mass(hi) == pytest.approx(0.125)
    with pytest.raises(InvalidHyperplaneError):
        restrict_halfspace(tri, (0, 0), 0.0)


def _gram_oracle(W: np.ndarray) -> float:
    return math.sqrt(max(np.linalg.det(W @ W.T), 0.0))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_multivector_pythagoras(seed, m, d):
    if m > d + 1:
        return
    W = np.random.default_rng(seed).normal(size=(m, d + 1))
    e, s, t = simple_norms(W)
    assert e == pytest.approx(_gram_oracle(W), rel=1e-10, abs=1e-12)
    assert s * s + t * t == pytest.approx(e * e, rel=1e-12, abs=1e-14)


def test_multivector_coordinates_are_minors():
    mv = MultiVector([[1.0, 2.0, 0.0], [0.0, 1.0, 3.0]])
    c = mv.coordinates()
    assert set(c) == set(itertools.combinations(range(3), 2))
    assert c[(0, 1)] == pytest.approx(1.0)
    assert c[(0, 2)] == pytest.approx(3.0)
    assert c[(1, 2)] == pytest.approx(6.0)
    assert mv.norm() == pytest.approx(math.sqrt(46.0))


def test_simplex_norms_time_and_space_directions():
    vertical = ((0.0, 0.0), (1.0, 0.0))
    horizontal = ((0.0, 0.0), (0.0, 1.0))
    e, s, t = simplex_norms([vertical, horizontal])
    assert list(e) == [1.0, 1.0]
    assert list(s) == [0.0, 1.0]
    assert list(t) == [1.0, 0.0]


def test_collinear_normal_form_merges_overlaps():
    T = canonicalize([([(0, 0), (2, 0)], 1.0), ([(0, 0), (1, 0)], -1.0), ([(1, 0), (2, 0)], -1.0)])
    assert not T.is_zero()
    assert collinear_normal_form(T).is_zero()
    U = canonicalize([([(0, 0), (2, 0)], 1.0), ([(1, 0), (3, 0)], 1.0)])
    N = collinear_normal_form(U)
    assert mass(N) == pytest.approx(mass(U))
    assert boundary(N) == boundary(U)
