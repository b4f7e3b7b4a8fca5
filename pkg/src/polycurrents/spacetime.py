"""Space-time chains in R^{1+d} (coordinate 0 is time) and trajectory calculus."""

from __future__ import annotations

import bisect
import csv
import io
import math
from collections.abc import Callable, Sequence
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
    map_vertices,
    mass,
    project_out,
    restrict_halfspace,
    simplex_norms,
    time_slice_embed,
)
from .errors import (
    DimensionMismatchError,
    EndpointMismatchError,
    InvalidReparameterizationError,
    NotATrajectoryError,
)

PROFILE_OFFSET = 1e-7
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


class SpaceTimeChain:
    """A chain in R^{1+d} whose vertex times lie in [0, 1]."""

    __slots__ = ("chain", "_traj")

    def __init__(self, chain: Chain, check: bool = True) -> None:
        if chain.d < 2:
            raise DimensionMismatchError("space-time chains need ambient dimension >= 2", d=chain.d)
        if chain.k < 1:
            raise DimensionMismatchError("space-time chains have dimension >= 1", k=chain.k)
        if check:
            for key in chain:
                for v in key:
                    if not 0.0 <= v[0] <= 1.0:
                        raise DimensionMismatchError("vertex time outside [0, 1]", time=v[0])
        self.chain = chain
        self._traj: bool | None = None

    @property
    def k(self) -> int:
        """Dimension of the slices."""
        return self.chain.k - 1

    @property
    def d(self) -> int:
        """Spatial dimension."""
        return self.chain.d - 1

    @property
    def is_trajectory(self) -> bool:
        """True when the boundary is supported in {0, 1} x R^d."""
        if self._traj is None:
            self._traj = all(
                all(v[0] == 0.0 for v in key) or all(v[0] == 1.0 for v in key)
                for key in boundary(self.chain))
        return self._traj

    def is_zero(self) -> bool:
        return self.chain.is_zero()

    def breakpoints(self) -> list[float]:
        return sorted({v[0] for key in self.chain for v in key} | {0.0, 1.0})

    def __add__(self, other: SpaceTimeChain) -> SpaceTimeChain:
        return SpaceTimeChain(self.chain + other.chain, check=False)

    def __sub__(self, other: SpaceTimeChain) -> SpaceTimeChain:
        return SpaceTimeChain(self.chain - other.chain, check=False)

    def __neg__(self) -> SpaceTimeChain:
        return SpaceTimeChain(-self.chain, check=False)

    def __mul__(self, s: float) -> SpaceTimeChain:
        return SpaceTimeChain(self.chain * s, check=False)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpaceTimeChain):
            return NotImplemented
        return self.chain == other.chain

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SpaceTimeChain(k={self.k}, d={self.d}, terms={len(self.chain)})"

    def to_json(self) -> dict[str, Any]:
        out = self.chain.to_json()
        out["spacetime"] = True
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> SpaceTimeChain:
        return cls(Chain.from_json(data))


def zero_trajectory(k: int, d: int) -> SpaceTimeChain:
    return SpaceTimeChain(Chain(k + 1, d + 1), check=False)


# ---------------------------------------------------------------------------
# constructions


def static(T: Chain) -> SpaceTimeChain:
    """[[0,1]] x T: the trajectory that stays at T."""
    return SpaceTimeChain(interval_product(0.0, 1.0, T), check=False)


def cone(T: Chain, v: Sequence[float]) -> SpaceTimeChain:
    """The trajectory collapsing T onto the point v at time 1.

    Each simplex maps to (-1)^k [[(0,v0),...,(0,vk),(1,v)]]; the sign makes
    the boundary of the cone over a cycle equal to -delta_0 x T for every k.
    """
    apex = (1.0,) + tuple(float(x) for x in v)
    if len(apex) != T.d + 1:
        raise DimensionMismatchError("apex has wrong dimension", expected=T.d, got=len(apex) - 1)
    sign = -1.0 if T.k % 2 else 1.0
    raw = [([(0.0,) + u for u in key] + [apex], sign * c) for key, c in T.items()]
    if not raw:
        return zero_trajectory(T.k, T.d)
    return SpaceTimeChain(canonicalize(raw, k=T.k + 1, d=T.d + 1), check=False)


def stretch(P: Chain) -> SpaceTimeChain:
    """Sum over simplices of the cone of the simplex boundary onto its first vertex.

    The result has boundary -delta_0 x dP, variation M(P), and spatial
    projection -P.
    """
    if P.k < 1:
        raise DimensionMismatchError("stretch needs a chain of dimension >= 1", k=P.k)
    out = Chain(P.k, P.d + 1)
    parts = []
    for key, c in P.items():
        face = boundary(Chain(P.k, P.d, {key: c}))
        parts.append(cone(face, key[0]).chain)
    if parts:
        items = [(kk, cc) for part in parts for kk, cc in part.items()]
        out = Chain._from_canonical(P.k, P.d + 1, items, max(p.max_coeff() for p in parts))
    return SpaceTimeChain(out, check=False)


def _time_map(S: SpaceTimeChain, fn: Callable[[float], float], sign: float = 1.0) -> SpaceTimeChain:
    moved = map_vertices(S.chain, lambda v: (fn(v[0]),) + v[1:])
    return SpaceTimeChain(moved * sign if sign != 1.0 else moved, check=False)


def endpoints(S: SpaceTimeChain) -> tuple[Chain, Chain]:
    """(∂⁻S, ∂⁺S) read off from ∂S = δ_1 × ∂⁺S − δ_0 × ∂⁻S."""
    bd = boundary(S.chain)
    lo, hi = {}, {}
    for key, c in bd.items():
        if all(v[0] == 0.0 for v in key):
            lo[tuple(v[1:] for v in key)] = -c
        elif all(v[0] == 1.0 for v in key):
            hi[tuple(v[1:] for v in key)] = c
        else:
            raise NotATrajectoryError("boundary has mass strictly inside (0, 1)",
                                      simplex=[list(v) for v in key])
    return Chain(S.k, S.d, lo), Chain(S.k, S.d, hi)


def _endpoint_gap(A: Chain, B: Chain) -> float:
    diff = A - B
    if diff.k == 1:
        diff = collinear_normal_form(diff)
    return mass(diff)


def concatenate(S1: SpaceTimeChain, S2: SpaceTimeChain) -> SpaceTimeChain:
    """S2 ∘ S1: S1 rescaled to [0, 1/2] followed by S2 on [1/2, 1]."""
    if (S1.k, S1.d) != (S2.k, S2.d):
        raise DimensionMismatchError("trajectories differ in dimension")
    _, end1 = endpoints(S1)
    start2, _ = endpoints(S2)
    if end1 != start2:
        raise EndpointMismatchError("end of the first trajectory differs from start of the second",
                                    mass_gap=_endpoint_gap(end1, start2))
    A = _time_map(S1, lambda t: t / 2.0)
    B = _time_map(S2, lambda t: 0.5 + t / 2.0)
    return A + B


def reverse(S: SpaceTimeChain) -> SpaceTimeChain:
    """S^{-1}: time reflected, orientation flipped so that the endpoints swap."""
    return _time_map(S, lambda t: 1.0 - t, sign=-1.0)


def split_at_times(C: Chain, times: Sequence[float]) -> Chain:
    """Subdivide every simplex of a space-time chain along the hyperplanes time = t."""
    e0 = [1.0] + [0.0] * (C.d - 1)
    for t in sorted(times):
        cross = {}
        keep = {}
        for key, c in C.items():
            lo = min(v[0] for v in key)
            hi = max(v[0] for v in key)
            (cross if lo < t < hi else keep)[key] = c
        if not cross:
            continue
        sub = Chain(C.k, C.d, cross)
        below = restrict_halfspace(sub, e0, t, "<=")
        above = restrict_halfspace(sub, e0, t, ">=")
        C = Chain(C.k, C.d, keep) + below + above
    return C


@dataclass(frozen=True)
class PLMap:
    """A strictly increasing piecewise-linear bijection of [0, 1] given by its knots."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        t, a = self.knots, self.values
        if len(t) != len(a) or len(t) < 2:
            raise InvalidReparameterizationError("knots and values must match, at least two")
        if t[0] != 0.0 or t[-1] != 1.0 or a[0] != 0.0 or a[-1] != 1.0:
            raise InvalidReparameterizationError("map must fix 0 and 1")
        if any(t[i + 1] <= t[i] for i in range(len(t) - 1)):
            raise InvalidReparameterizationError("knots must increase strictly")
        if any(a[i + 1] <= a[i] for i in range(len(a) - 1)):
            raise InvalidReparameterizationError("map must be strictly increasing")

    @classmethod
    def from_function(cls, fn: Callable[[float], float], pieces: int) -> PLMap:
        t = [i / pieces for i in range(pieces + 1)]
        a = [0.0] + [float(fn(x)) for x in t[1:-1]] + [1.0]
        return cls(tuple(t), tuple(a))

    def __call__(self, t: float) -> float:
        i = bisect.bisect_left(self.knots, t)
        if i < len(self.knots) and self.knots[i] == t:
            return self.values[i]
        i = min(max(i, 1), len(self.knots) - 1)
        t0, t1 = self.knots[i - 1], self.knots[i]
        a0, a1 = self.values[i - 1], self.values[i]
        return a0 + (t - t0) * (a1 - a0) / (t1 - t0)


def reparameterize(S: SpaceTimeChain, a: PLMap) -> SpaceTimeChain:
    """a_* S for a PL time change; simplices are first cut at the knots of a."""
    if not isinstance(a, PLMap):
        a = PLMap(*a)
    cut = split_at_times(S.chain, a.knots[1:-1])
    return _time_map(SpaceTimeChain(cut, check=False), a)


# ---------------------------------------------------------------------------
# slicing


def _slice_parts(C: Chain, t: float, strict: bool) -> Chain:
    e0 = [1.0] + [0.0] * (C.d - 1)
    lower = restrict_halfspace(C, e0, t, "<=", strict=strict)
    bd = boundary(C)
    bd_lower = restrict_halfspace(bd, e0, t, "<=", strict=strict)
    return project_out(boundary(lower) - bd_lower, 0)


def _cut(p: Point, q: Point, t: float) -> Point:
    # same arithmetic as restrict_halfspace, so both slicing routes share cut points
    lam = (p[0] - t) / ((p[0] - t) - (q[0] - t))
    x = [a + lam * (b - a) for a, b in zip(p, q)]
    x[0] = t
    return tuple(x)


def _section(C: Chain, t: float) -> Chain:
    """Transverse section of a 1- or 2-chain by {time = t}, t not a vertex time.

    A 2-simplex meets the hyperplane in a segment oriented so that e_0 wedge
    the segment is a positive multiple of the simplex orientation.
    """
    items = []
    for key, c in C.items():
        if C.k == 1:
            p, q = key
            items.append(([_cut(p, q, t)[1:]], c))
            continue
        n = len(key)
        pts = [_cut(key[i], key[j], t) for i in range(n) for j in range(i + 1, n)
               if (key[i][0] - t) * (key[j][0] - t) < 0.0]
        if len(pts) != 2:
            continue
        x1, x2 = pts
        v0 = key[0]
        a = [u - w for u, w in zip(key[1], v0)]
        b = [u - w for u, w in zip(key[2], v0)]
        e = [u - w for u, w in zip(x2, x1)]
        # <e_0 ^ e, a ^ b> = a_0 (e.b) - b_0 (e.a)
        dot = a[0] * sum(x * y for x, y in zip(e, b)) - b[0] * sum(x * y for x, y in zip(e, a))
        items.append(([x1[1:], x2[1:]], c if dot > 0 else -c))
    if not items:
        return Chain(C.k - 1, C.d - 1)
    return canonicalize(items, k=C.k - 1, d=C.d - 1)


def _straddling(S: SpaceTimeChain, t: float) -> tuple[Chain | None, bool]:
    sub = {key: c for key, c in S.chain.items()
           if min(v[0] for v in key) <= t <= max(v[0] for v in key)}
    if not sub:
        return None, False
    at_break = any(v[0] == t for key in sub for v in key)
    return Chain(S.chain.k, S.chain.d, sub), at_break


def slice_cylinder(S: SpaceTimeChain, t: float) -> tuple[Chain, bool]:
    """S(t) by the cylinder formula, and whether t was a vertex time.

    S(t) = p_*(∂(S⌞{time < t}) − (∂S)⌞{time < t}). At a vertex time the open
    and closed versions are averaged, which is the two-sided mean of the
    one-sided slices.
    """
    t = float(t)
    C, at_break = _straddling(S, t)
    if C is None:
        return Chain(S.k, S.d), False
    open_part = _slice_parts(C, t, strict=True)
    if not at_break:
        return open_part, False
    closed_part = _slice_parts(C, t, strict=False)
    return 0.5 * (open_part + closed_part), True


def slice_with_flag(S: SpaceTimeChain, t: float) -> tuple[Chain, bool]:
    """S(t) and whether t was a vertex time.

    Away from vertex times, chains of dimension at most 2 are cut directly;
    everything else goes through the cylinder formula.
    """
    t = float(t)
    C, at_break = _straddling(S, t)
    if C is None:
        return Chain(S.k, S.d), False
    if not at_break and C.k <= 2:
        return _section(C, t), False
    return slice_cylinder(S, t)


def slice_at(S: SpaceTimeChain, t: float) -> Chain:
    return slice_with_flag(S, t)[0]


def slice_mass(S: SpaceTimeChain, t: float) -> float:
    return mass(slice_at(S, t))


# ---------------------------------------------------------------------------
# variation and norms


def _slab_pieces(C: Chain, lo: float, hi: float, open_ends: bool = False) -> Chain:
    e0 = [1.0] + [0.0] * (C.d - 1)
    inside, partial = {}, {}
    for key, c in C.items():
        tmin = min(v[0] for v in key)
        tmax = max(v[0] for v in key)
        if open_ends and (tmax <= lo or tmin >= hi):
            continue
        if tmax < lo or tmin > hi:
            continue
        if lo <= tmin and tmax <= hi and not (open_ends and (tmin == tmax)):
            inside[key] = c
        else:
            partial[key] = c
    out = Chain(C.k, C.d, inside)
    if partial:
        P = Chain(C.k, C.d, partial)
        P = restrict_halfspace(P, e0, lo, ">=", strict=open_ends)
        P = restrict_halfspace(P, e0, hi, "<=", strict=open_ends)
        out = out + P
    return out


def _variation_of_chain(C: Chain) -> float:
    if C.is_zero():
        return 0.0
    keys = list(C)
    _, spatial, _ = simplex_norms(keys)
    coeffs = np.fromiter((abs(C[key]) for key in keys), float, len(keys))
    return float(coeffs @ spatial) / math.factorial(C.k)


def variation(S: SpaceTimeChain | Chain, interval: Sequence[float] = (0.0, 1.0),
              open_interval: bool = False) -> float:
    """Var(S; I) = sum |c| |p eta| / |eta| H^{1+k}(simplex ∩ I × R^d)."""
    C = S.chain if isinstance(S, SpaceTimeChain) else S
    lo, hi = float(interval[0]), float(interval[1])
    return _variation_of_chain(_slab_pieces(C, lo, hi, open_interval))


def spatial_projection(S: SpaceTimeChain) -> Chain:
    return project_out(S.chain, 0)


@dataclass
class TimeProfile:
    breakpoints: list[float]
    samples_per_interval: int
    times: list[float]
    values: list[float]
    warning: str | None = None

    def max(self) -> float:
        return max(self.values, default=0.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "mass"])
        for t, m in zip(self.times, self.values):
            w.writerow([repr(t), repr(m)])
        return buf.getvalue()


def _profile_times(bps: Sequence[float], m: int) -> list[float]:
    times = []
    for a, b in zip(bps[:-1], bps[1:]):
        L = b - a
        times.append(a + PROFILE_OFFSET * L)
        times.extend(a + L * j / (m + 1) for j in range(1, m + 1))
        times.append(b - PROFILE_OFFSET * L)
    return times


def _profile(S: SpaceTimeChain, interval: Sequence[float], m: int) -> TimeProfile:
    lo, hi = float(interval[0]), float(interval[1])
    bps = [lo] + [t for t in S.breakpoints() if lo < t < hi] + [hi]
    times = _profile_times(bps, m)
    values = [slice_mass(S, t) for t in times]
    return TimeProfile(bps, m, times, values)


def linfty(S: SpaceTimeChain, interval: Sequence[float] = (0.0, 1.0), m: int = 16,
           refine_check: bool = True) -> tuple[float, TimeProfile]:
    """Sampled esssup of the slice mass over the interval."""
    prof = _profile(S, interval, m)
    value = prof.max()
    if refine_check and value > 0.0:
        fine = _profile(S, interval, 2 * m).max()
        rel = abs(fine - value) / value
        if rel >= 1e-3:
            prof.warning = f"doubling samples changed the maximum by {rel:.2e} (relative)"
    return value, prof


def coarea_check(S: SpaceTimeChain) -> tuple[float, float]:
    """(∫ M(S(t)) dt, Σ |c| |η⌞dt| / |η| H^{1+k}).

    The left side integrates the slice mass with an 8-point Gauss-Legendre rule
    on every interval between vertex times. Slice masses are polynomial of
    degree at most k there, so the rule is exact up to rounding, and it never
    evaluates at a vertex time.
    """
    bps = S.breakpoints()
    lhs = 0.0
    for a, b in zip(bps[:-1], bps[1:]):
        half = (b - a) / 2.0
        mid = (a + b) / 2.0
        lhs += half * sum(w * slice_mass(S, mid + half * x)
                          for x, w in zip(_GAUSS_NODES, _GAUSS_WEIGHTS))
    keys = list(S.chain)
    if not keys:
        return lhs, 0.0
    _, _, temporal = simplex_norms(keys)
    coeffs = np.fromiter((abs(S.chain[key]) for key in keys), float, len(keys))
    rhs = float(coeffs @ temporal) / math.factorial(S.chain.k)
    return lhs, rhs


def cumulative_variation(S: SpaceTimeChain, knots: Sequence[float]) -> list[float]:
    """Var(S; [knots[0], knots[i]]) for each i, from one subdivision at all knots."""
    cut = split_at_times(S.chain, knots[1:-1])
    per = [0.0] * (len(knots) - 1)
    if not cut.is_zero():
        keys = list(cut)
        _, spatial, _ = simplex_norms(keys)
        fact = math.factorial(cut.k)
        for key, sp in zip(keys, spatial):
            mid = sum(v[0] for v in key) / len(key)
            i = min(max(bisect.bisect_right(knots, mid) - 1, 0), len(per) - 1)
            per[i] += abs(cut[key]) * sp / fact
    out = [0.0]
    for p in per:
        out.append(out[-1] + p)
    return out


def lipschitz_estimate(S: SpaceTimeChain) -> float:
    """Largest slope of t -> Var(S;(0,t)) + Var(∂S;(0,t)) between consecutive vertex times.

    The estimate resolves the variation at the vertex times of S only; inside
    one such interval the slice measure of a (1+k)-simplex grows like a
    polynomial of degree k, which the estimate does not resolve.
    """
    bps = S.breakpoints()
    cum = cumulative_variation(S, bps)
    bvar = variation(boundary(S.chain), (0.0, 1.0), open_interval=True) if S.chain.k >= 1 else 0.0
    slopes = [(cum[i + 1] - cum[i]) / (bps[i + 1] - bps[i]) for i in range(len(bps) - 1)]
    return max(slopes, default=0.0) + bvar


def normalize_speed(S: SpaceTimeChain, m: int = 16, theta: float = 1e-8) -> SpaceTimeChain:
    """Reparameterize so cumulative variation grows affinely on a refined breakpoint grid.

    Knots are the vertex times of S with m uniform subdivisions per interval.
    The map a = (1 - theta) Var(S;[0,t]) / Var(S) + theta t is strictly
    increasing, so static stretches (zero variation) keep a positive duration.
    """
    bps = S.breakpoints()
    knots = []
    for a, b in zip(bps[:-1], bps[1:]):
        knots.extend(a + (b - a) * j / m for j in range(m))
    knots.append(1.0)
    cum = cumulative_variation(S, knots)
    total = cum[-1]
    # cutting a static piece leaves rounding-level spatial parts behind
    if total <= 1e-12 * mass(S.chain):
        return S
    vals = [0.0] + [(1.0 - theta) * c / total + theta * t for c, t in zip(cum[1:-1], knots[1:-1])] + [1.0]
    return reparameterize(S, PLMap(tuple(knots), tuple(vals)))


@dataclass
class TrajectoryReport:
    var: float
    boundary_var: float
    linfty: float
    boundary_linfty: float
    lip: float
    endpoints: tuple[Chain, Chain]
    profile: TimeProfile
    constants: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "var": self.var,
            "boundary_var": self.boundary_var,
            "linfty": self.linfty,
            "boundary_linfty": self.boundary_linfty,
            "lip": self.lip,
            "endpoints": [self.endpoints[0].to_json(), self.endpoints[1].to_json()],
            "profile_warning": self.profile.warning,
            "constants": self.constants,
        }


def trajectory_report(S: SpaceTimeChain, m: int = 16, refine_check: bool = True) -> TrajectoryReport:
    ends = endpoints(S)
    var = variation(S)
    bd = boundary(S.chain)
    bvar = variation(bd, (0.0, 1.0), open_interval=True)
    value, prof = linfty(S, (0.0, 1.0), m, refine_check)
    if S.k >= 1:
        bS = SpaceTimeChain(bd, check=False)
        blinf = _profile(bS, (0.0, 1.0), m).max()
    else:
        blinf = 0.0
    lip = lipschitz_estimate(S)
    proj = mass(spatial_projection(S))
    constants = {
        "mass_projection": proj,
        "mass_start": mass(ends[0]),
        "mass_end": mass(ends[1]),
    }
    return TrajectoryReport(var, bvar, value, blinf, lip, ends, prof, constants)


def static_embed(t: float, T: Chain) -> Chain:
    """δ_t × T as a chain in R^{1+d}."""
    return time_slice_embed(t, T)
