import numpy as np
import pytest

from polycurrents.chains import Chain, canonicalize


def random_simplex(rng: np.random.Generator, k: int, d: int, scale: float = 4.0) -> list[tuple]:
    # dyadic coordinates keep sums and differences exact
    pts = rng.integers(-int(8 * scale), int(8 * scale) + 1, size=(k + 1, d)) / 8.0
    return [tuple(p) for p in pts.tolist()]


def random_chain(rng: np.random.Generator, k: int, d: int, n: int = 4) -> Chain:
    raw = [(random_simplex(rng, k, d), float(rng.integers(-5, 6)) or 1.0) for _ in range(n)]
    T = canonicalize(raw, k=k, d=d)
    return T


def random_polygon_loop(rng: np.random.Generator, n: int = 6, center=(0.0, 0.0), radius: float = 1.0) -> Chain:
    angles = np.sort(rng.uniform(0, 2 * np.pi, n))
    radii = radius * rng.uniform(0.4, 1.0, n)
    pts = [(center[0] + r * np.cos(a), center[1] + r * np.sin(a)) for a, r in zip(angles, radii)]
    return canonicalize([([pts[i], pts[(i + 1) % n]], 1.0) for i in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def moments(C: Chain) -> np.ndarray:
    """Integrals of every constant and linear-coefficient k-form over C.

    Two chains representing the same current give equal moments, which is a
    rounding-tolerant substitute for canonical equality.
    """
    import itertools
    import math

    k, d = C.k, C.d
    combos = list(itertools.combinations(range(d), k))
    out = np.zeros((len(combos), d + 1))
    for key, c in C.items():
        V = np.asarray(key, dtype=float)
        cen = V.mean(axis=0)
        if k == 0:
            xi = np.ones(1)
        else:
            E = V[1:] - V[0]
            xi = np.array([np.linalg.det(E[:, list(I)]) for I in combos]) / math.factorial(k)
        out += c * np.outer(xi, np.concatenate([[1.0], cen]))
    return out


def same_current(A: Chain, B: Chain, tol: float = 1e-9) -> bool:
    scale = max(1.0, float(np.abs(moments(A)).max(initial=0)), float(np.abs(moments(B)).max(initial=0)))
    return (A.k, A.d) == (B.k, B.d) and bool(np.abs(moments(A) - moments(B)).max(initial=0) <= tol * scale)
