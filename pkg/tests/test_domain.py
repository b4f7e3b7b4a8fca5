import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycurrents.domain import (
    PolygonalDomain,
    check_contraction,
    combine_directions,
    contraction_map,
    direction_field,
    is_good_direction,
    l_shape,
    no_retraction_witness,
    square_annulus,
    unit_square,
    verify_field,
)
from polycurrents.errors import ContradictionError, InvalidInputError, NotApplicableError

DOMAINS = {"square": unit_square, "lshape": l_shape, "annulus": square_annulus}


def test_good_direction_examples():
    sq = unit_square()
    assert is_good_direction(sq, (0.5, 0.0), (0.0, 1.0), 0.4)
    assert not is_good_direction(sq, (0.5, 0.0), (0.0, -1.0), 0.4)
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    assert is_good_direction(sq, (0.0, 0.0), v, 0.3)
    # parallel to an edge is not good
    assert not is_good_direction(sq, (0.5, 0.0), (1.0, 0.0), 0.4)
    with pytest.raises(NotApplicableError):
        is_good_direction(sq, (0.5, 0.5), (0.0, 1.0), 0.1)


def test_reflex_corner_directions():
    L = l_shape()
    d = np.array([-1.0, -1.0]) / math.sqrt(2)
    assert is_good_direction(L, (1.0, 1.0), d, 0.3)
    assert not is_good_direction(L, (1.0, 1.0), -d, 0.3)


def test_combine_directions():
    assert combine_directions([(0.0, 1.0)], [1.0]) == pytest.approx((0.0, 1.0))
    assert combine_directions([(0.0, 1.0), (1.0, 0.0)], [0.5, 0.5]) == pytest.approx(
        (1 / math.sqrt(2), 1 / math.sqrt(2)))
    with pytest.raises(ContradictionError):
        combine_directions([(0.0, 1.0), (0.0, -1.0)], [0.5, 0.5])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.sampled_from([((0.0, 0.0), 0.3), ((2.0, 1.0), 0.3), ((0.0, 2.0), 0.3)]))
def test_good_directions_closed_under_combination(lam, corner):
    x0, delta = corner
    omega = l_shape()
    # sample two good directions at the corner and check their normalized blend
    rng = np.random.default_rng(int(lam * 1e6))
    good = []
    while len(good) < 2:
        a = rng.uniform(0, 2 * math.pi)
        v = (math.cos(a), math.sin(a))
        if is_good_direction(omega, x0, v, delta):
            good.append(v)
    w = combine_directions(good, [lam, 1 - lam])
    assert is_good_direction(omega, x0, w, delta)


def test_square_field_is_edge_normal_mid_edge():
    F = direction_field(unit_square())
    v = F(np.array([[0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]]))
    np.testing.assert_allclose(v, [[0, 1], [-1, 0], [0, -1], [1, 0]], atol=1e-12)


def test_annulus_field_points_into_material():
    F = direction_field(square_annulus())
    v = F(np.array([[0.0, -1.0], [0.0, -2.0]]))
    np.testing.assert_allclose(v, [[0, -1], [0, 1]], atol=1e-12)


@pytest.mark.parametrize("name", sorted(DOMAINS))
def test_field_verification(name):
    rep = verify_field(direction_field(DOMAINS[name]()))
    assert rep["passed"], rep
    assert rep["inward_total"] == 16000


@pytest.mark.parametrize("name", sorted(DOMAINS))
def test_contraction_map(name):
    omega = DOMAINS[name]()
    f = contraction_map(omega, 0.1, n_pairs=4000)
    assert f.lipschitz <= 1.1 and f.displacement < 0.1
    rng = np.random.default_rng(5)
    pts = np.vstack([omega.sample_boundary(500, rng), omega.sample_closure(500, rng)])
    img = pts
    for _ in range(3):
        img = f(img)
        assert omega.contains(img).all()
    # deep points stay fixed
    if name == "square":
        assert f(np.array([[0.5, 0.5]])) == pytest.approx(np.array([[0.5, 0.5]]))


def test_reflex_corner_images_inside():
    omega = l_shape()
    f = contraction_map(omega, 0.05, n_pairs=2000)
    near = np.array([1.0, 1.0]) + 1e-3 * np.array([[-1, -1], [-1, 0], [0, -1], [-0.5, -0.2], [0, 0]])
    assert omega.contains(f(near)).all()


def test_independent_contraction_check():
    f = contraction_map(unit_square(), 0.2, n_pairs=2000)
    rep = check_contraction(f, n_pairs=3000, seed=99)
    assert rep["passed"], rep


def _lens_meets_domain(L: float, t: float, n: int = 400) -> bool:
    # grid the lens and test each point against {x2 <= |x1|} within the closed unit ball
    r = L * t
    xs = np.linspace(-r, r, n)
    ys = np.linspace(t - r, t + r, n)
    X, Y = np.meshgrid(xs, ys)
    X, Y = X.ravel(), Y.ravel()
    in_lens = ((X - t) ** 2 + (Y - t) ** 2 <= r * r) & ((X + t) ** 2 + (Y - t) ** 2 <= r * r)
    in_omega = (Y <= np.abs(X)) & (X * X + Y * Y <= 1.0)
    return bool((in_lens & in_omega).any())


@pytest.mark.parametrize("L", [1.0, 1.2, 1.41, 1.5, 2.0])
def test_no_retraction_witness_against_sampling(L):
    expected = L < math.sqrt(2)
    assert no_retraction_witness(L, 0.1) is expected
    if expected:
        assert not _lens_meets_domain(L, 0.1)
    else:
        assert _lens_meets_domain(L, 0.1)


def test_no_retraction_touching_case_and_scale():
    assert not no_retraction_witness(math.sqrt(2), 0.1)
    for t in (0.01, 0.05, 0.2):
        assert no_retraction_witness(1.2, t) and not no_retraction_witness(1.5, t)
    with pytest.raises(InvalidInputError):
        no_retraction_witness(1.0, 1.5)


def test_polygon_validation_and_json():
    P = PolygonalDomain([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert P.contains(np.array([[0.5, 0.5]])).all()
    back = PolygonalDomain.from_json(P.to_json())
    assert back.n_edges == 4
    with pytest.raises(InvalidInputError):
        PolygonalDomain([(0, 0), (1, 0)])
