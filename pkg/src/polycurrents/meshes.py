"""Example meshes and example chain sequences."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .chains import Chain, canonicalize
from .complex import SimplicialComplex, build_complex


def interval_mesh(a: float = -2.0, b: float = 2.0, n: int = 4) -> SimplicialComplex:
    xs = np.linspace(a, b, n + 1)
    return build_complex([[(xs[i],), (xs[i + 1],)] for i in range(n)])


def segment_mesh(n: int = 200, a: float = 0.0, b: float = 1.0) -> SimplicialComplex:
    return interval_mesh(a, b, n)


def _square_loop(half: float, per_side: int = 1) -> list[tuple[float, float]]:
    """Counterclockwise points on the square [-half, half]^2 starting at (half, -half)."""
    corners = [(half, -half), (half, half), (-half, half), (-half, -half)]
    pts = []
    for i in range(4):
        p, q = np.array(corners[i]), np.array(corners[(i + 1) % 4])
        for s in range(per_side):
            pts.append(tuple((p + (q - p) * s / per_side).tolist()))
    return pts


def _zip_rings(outer: Sequence[tuple], inner: Sequence[tuple]) -> list[list[tuple]]:
    """Triangulate the region between two nested star-shaped loops around the origin."""
    def ang(p):
        return math.atan2(p[1], p[0]) % (2 * math.pi)

    def rotate(loop):
        i = min(range(len(loop)), key=lambda j: ang(loop[j]))
        return list(loop[i:]) + list(loop[:i])

    A, B = rotate(outer), rotate(inner)
    aa = [ang(p) for p in A] + [ang(A[0]) + 2 * math.pi]
    bb = [ang(p) for p in B] + [ang(B[0]) + 2 * math.pi]
    i = j = 0
    tris = []
    while i < len(A) or j < len(B):
        if j >= len(B) or (i < len(A) and aa[i + 1] <= bb[j + 1]):
            tris.append([A[i], A[(i + 1) % len(A)], B[j % len(B)]])
            i += 1
        else:
            tris.append([B[j], B[(j + 1) % len(B)], A[i % len(A)]])
            j += 1
    return tris


def annulus_mesh(outer: float = 3.0, inner: float = 1.0) -> SimplicialComplex:
    """Square with a square hole: 8 points on each boundary loop, 16 triangles."""
    return build_complex(_zip_rings(_square_loop(outer, 2), _square_loop(inner, 2)))


def annulus_generator(inner: float = 1.0) -> Chain:
    """The inner boundary loop, counterclockwise: a cycle that bounds nothing in the annulus."""
    return loop_chain(_square_loop(inner, 2))


def disk_mesh(n_loops: int = 8, n_outer: int = 32, radius: float = 1.0) -> SimplicialComplex:
    """A convex polygonal disk containing the concentric square loops of side 1/j, j <= n_loops."""
    outer = [(radius * math.cos(2 * math.pi * i / n_outer + 0.1),
              radius * math.sin(2 * math.pi * i / n_outer + 0.1)) for i in range(n_outer)]
    loops = [_square_loop(0.5 / j) for j in range(1, n_loops + 1)]
    tris = _zip_rings(outer, loops[0])
    for j in range(len(loops) - 1):
        tris += _zip_rings(loops[j], loops[j + 1])
    inner = loops[-1]
    for i in range(4):
        tris.append([inner[i], inner[(i + 1) % 4], (0.0, 0.0)])
    return build_complex(tris)


def loop_chain(points: Sequence[Sequence[float]], coeff: float = 1.0) -> Chain:
    """Closed polyline through the points as a 1-cycle."""
    n = len(points)
    return canonicalize([([points[i], points[(i + 1) % n]], coeff) for i in range(n)])


def square_loop(side: float, center: Sequence[float] = (0.0, 0.0)) -> Chain:
    h = side / 2.0
    cx, cy = center
    return loop_chain([(cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h), (cx - h, cy - h)])


def shrinking_loops(n: int = 8) -> list[Chain]:
    """Concentric square loops of side 1/j (perimeter 4/j)."""
    return [square_loop(1.0 / j) for j in range(1, n + 1)]


def dirac(points_weights: Sequence[tuple[Sequence[float], float]]) -> Chain:
    return canonicalize([([p], w) for p, w in points_weights])


def circle_polyline(n: int = 64, radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> Chain:
    cx, cy = center
    return loop_chain([(cx + radius * math.cos(2 * math.pi * i / n),
                        cy + radius * math.sin(2 * math.pi * i / n)) for i in range(n)])
