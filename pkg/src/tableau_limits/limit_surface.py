"""Limiting height function, limiting surface, frozen boundary and closed forms.

The limiting height on a vertical line is ``H(x, t) = (1/pi) * int_0^t alpha(x, s) ds``
where ``alpha`` vanishes on the frozen part of the line. Each line is handled by a
:class:`VerticalProfile` that locates the phase transitions once and caches the
mass of every liquid interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .critical import alpha_on_column, degenerate_column, solve_critical
from .diagram import InterlacingDiagram, NormalizedShape, from_rational
from .errors import QuadratureError, ShapeError
from .quadrature import sin2_cumulative, sin2_integrate

DEFAULT_ABSTOL = 1e-10
T_TOL = 1e-9
CONTINUITY_GAP = 1e-6
SCAN_POINTS = 8


@dataclass(frozen=True)
class HeightQuery:
    shape: NormalizedShape
    x: float
    t: float
    abstol: float = DEFAULT_ABSTOL

    def __post_init__(self):
        shape = NormalizedShape.of(self.shape)
        object.__setattr__(self, "shape", shape)
        lo, hi = shape.support
        if not lo - 1e-12 <= self.x <= hi + 1e-12:
            raise ValueError(f"x={self.x} outside [{lo}, {hi}]")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t={self.t} outside [0, 1]")


@dataclass(frozen=True)
class SurfaceValue:
    t_minus_val: float
    t_plus_val: float

    @property
    def continuous_at_point(self) -> bool:
        return self.t_plus_val - self.t_minus_val <= CONTINUITY_GAP

    @property
    def value(self) -> float:
        return 0.5 * (self.t_minus_val + self.t_plus_val)


@dataclass(frozen=True)
class FrozenBoundary:
    s: np.ndarray
    x: np.ndarray
    t: np.ndarray
    is_cusp: np.ndarray
    cusps: tuple[float, ...]
    poles: tuple[float, ...]
    dropped: int

    def rows(self):
        for row in zip(self.s, self.x, self.t, self.is_cusp):
            yield float(row[0]), float(row[1]), float(row[2]), bool(row[3])


@dataclass(frozen=True)
class ContinuityResult:
    holds: bool
    lhs: tuple[Fraction, ...]
    rhs: tuple[Fraction, ...]

    @property
    def residuals(self) -> tuple[Fraction, ...]:
        return tuple(l - r for l, r in zip(self.lhs, self.rhs))

    def __bool__(self):
        return self.holds


# ---------------------------------------------------------------------------
# phase transitions on a vertical line


def _boundary_poly(shape, x):
    """Polynomial in s whose real roots are the frozen-boundary crossings of column x."""
    qa = np.poly(shape.xa)
    qb = np.poly(shape.xb)
    lhs = np.polymul([1.0, -x], np.polysub(np.polymul(np.polyder(qa), qb), np.polymul(qa, np.polyder(qb))))
    poly = np.polysub(lhs, np.polymul(qa, qb))
    # leading terms cancel exactly
    return poly[1:]


def _boundary_t(shape, s, x, k):
    xa = np.delete(shape.xa, k) if k is not None else shape.xa
    num = np.prod(s - shape.xb)
    den = np.prod(s - xa)
    return 1.0 - num / den if k is not None else 1.0 - num / den * (s - x)


def transition_candidates(shape, x: float) -> np.ndarray:
    """Values of t in (0, 1) where the frozen boundary crosses the line at x."""
    shape = NormalizedShape.of(shape)
    k = degenerate_column(shape, x)
    if k is not None:
        x = float(shape.xa[k])
    roots = np.roots(_boundary_poly(shape, x))
    ts = []
    for s in roots:
        if abs(s.imag) > 1e-7 * (1 + abs(s)):
            continue
        s = s.real
        if k is not None and abs(s - x) < 1e-9:
            continue
        poles = np.concatenate([shape.xa, shape.xb])
        if np.min(np.abs(poles - s)) < 1e-12:
            continue
        t = _boundary_t(shape, s, x, k)
        if 0.0 < t < 1.0:
            ts.append(float(t))
    return np.unique(ts)


def _is_liquid(shape, x, t):
    return solve_critical(shape, x, t).liquid


def _bisect_transition(shape, x, lo, hi, liquid_lo, steps=55):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _is_liquid(shape, x, mid) == liquid_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class VerticalProfile:
    """Liquid intervals and their masses on one vertical line.

    ``pieces`` are integration intervals (a liquid interval may be split at a
    candidate transition); ``intervals`` merges touching pieces.
    """

    shape: NormalizedShape
    x: float
    abstol: float = DEFAULT_ABSTOL
    pieces: list = field(init=False)
    masses: np.ndarray = field(init=False)

    def __post_init__(self):
        self.shape = NormalizedShape.of(self.shape)
        HeightQuery(self.shape, self.x, 0.0)
        self.pieces = self._find_pieces()
        self.masses = np.array([self._integrate(lo, hi, hi) for lo, hi in self.pieces])

    def _alpha(self, ts):
        return alpha_on_column(self.shape, self.x, ts)

    def _find_pieces(self):
        shape, x = self.shape, self.x
        k = degenerate_column(shape, x)
        if k is not None and k in (0, shape.m):
            return []
        cuts = np.concatenate([[0.0], transition_candidates(shape, x), [1.0]])
        frac = (np.arange(SCAN_POINTS) + 0.5) / SCAN_POINTS
        pieces = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            probe = lo + (hi - lo) * frac
            liquid = self._alpha(probe) > 0
            # a missed transition shows up as a disagreement between probes
            edges = [lo]
            states = [liquid[0]]
            for j in range(1, SCAN_POINTS):
                if liquid[j] != liquid[j - 1]:
                    edges.append(_bisect_transition(shape, x, probe[j - 1], probe[j], bool(liquid[j - 1])))
                    states.append(liquid[j])
            edges.append(hi)
            for a, b, st in zip(edges[:-1], edges[1:], states):
                if st and b > a:
                    pieces.append((float(a), float(b)))
        return pieces

    @property
    def intervals(self) -> list[tuple[float, float]]:
        out = []
        for lo, hi in self.pieces:
            if out and abs(out[-1][1] - lo) <= 1e-12:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
        return out

    @property
    def total(self) -> float:
        return float(self.masses.sum()) / math.pi

    def _integrate(self, lo, hi, upper):
        return sin2_integrate(self._alpha, lo, hi, upper, self.abstol)

    def height(self, t: float) -> float:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [0, 1]")
        acc = 0.0
        for (lo, hi), mass in zip(self.pieces, self.masses):
            if t >= hi:
                acc += mass
            elif t > lo:
                acc += self._integrate(lo, hi, t)
        return acc / math.pi

    def heights(self, ts) -> np.ndarray:
        """Vectorized :meth:`height` sharing one quadrature pass per liquid piece."""
        ts = np.asarray(ts, dtype=float)
        if np.any((ts < 0) | (ts > 1)):
            raise ValueError("t outside [0, 1]")
        acc = np.zeros(ts.shape)
        for (lo, hi), mass in zip(self.pieces, self.masses):
            acc += np.where(ts >= hi, mass, 0.0)
            inside = (ts > lo) & (ts < hi)
            if inside.any():
                acc[inside] += sin2_cumulative(self._alpha, lo, hi, ts[inside], self.abstol)
        return acc / math.pi

    def surface(self, y: float, tol: float = T_TOL) -> SurfaceValue:
        """``T_-`` and ``T_+`` for target height ``(y - |x|)/2``."""
        h = 0.5 * (y - abs(self.x))
        cum = np.concatenate([[0.0], np.cumsum(self.masses)]) / math.pi
        if h < -tol or h > cum[-1] + tol:
            raise ValueError(f"(x, y)=({self.x}, {y}) is outside the domain: target {h} not in [0, {cum[-1]}]")
        n = len(self.pieces)
        if n == 0 or h <= tol:
            return SurfaceValue(0.0, self.pieces[0][0] if n else 1.0)
        j = int(np.argmax(cum[1:] >= h - tol))
        lo, hi = self.pieces[j]
        if h >= cum[j + 1] - tol:
            nxt = self.pieces[j + 1][0] if j + 1 < n else 1.0
            return SurfaceValue(hi, nxt)
        base = cum[j]

        def resid(t):
            return base + self._integrate(lo, hi, t) / math.pi - h

        t = brentq(resid, lo, hi, xtol=min(tol, 1e-12), rtol=4 * np.finfo(float).eps)
        return SurfaceValue(t, t)

    def plateaus(self, dt: float = 1e-3, tol: float | None = None) -> list[tuple[float, float]]:
        """Interior runs of at least three increments of H below ``tol`` on a t-grid of step dt."""
        tol = self.abstol if tol is None else tol
        ts = np.linspace(0.0, 1.0, int(round(1.0 / dt)) + 1)
        inc = np.diff(self.heights(ts)) * math.pi
        flat = inc / math.pi <= tol
        out = []
        j = 0
        n = len(flat)
        while j < n:
            if flat[j]:
                e = j
                while e + 1 < n and flat[e + 1]:
                    e += 1
                if e - j + 1 >= 3 and j > 0 and e < n - 1:
                    out.append((float(ts[j]), float(ts[e + 1])))
                j = e + 1
            else:
                j += 1
        return out


@lru_cache(maxsize=256)
def _profile(shape, x, abstol):
    return VerticalProfile(shape, x, abstol)


def vertical_profile(shape, x: float, abstol: float = DEFAULT_ABSTOL) -> VerticalProfile:
    return _profile(NormalizedShape.of(shape), float(x), float(abstol))


def height_infinity(q: HeightQuery | None = None, *, shape=None, x=None, t=None,
                    abstol: float = DEFAULT_ABSTOL) -> float:
    """Limiting height ``(1/pi) int_0^t alpha(x, s) ds``.

    Accepts a :class:`HeightQuery` or keyword arguments.
    """
    if q is None:
        q = HeightQuery(shape, float(x), float(t), abstol)
    return vertical_profile(q.shape, q.x, q.abstol).height(q.t)


def surface_T(shape, x: float, y: float, tol: float = T_TOL) -> SurfaceValue:
    """Envelope ``(T_-, T_+)`` of the limiting surface at ``(x, y)``."""
    shape = NormalizedShape.of(shape)
    if not abs(x) <= y <= shape.omega(x) + 1e-12:
        raise ValueError(f"(x, y)=({x}, {y}) is not in the closed domain")
    return vertical_profile(shape, x).surface(y, tol)


# ---------------------------------------------------------------------------
# exact continuity criterion


def continuity_criterion(d: InterlacingDiagram) -> ContinuityResult:
    """Exact check of ``sum_{i != i0} 1/(a_i0 - a_i) == sum_i 1/(a_i0 - b_i)`` for interior i0."""
    if isinstance(d, NormalizedShape):
        d = d.base
    a = [Fraction(v) for v in d.a]
    b = [Fraction(v) for v in d.b]
    lhs, rhs = [], []
    for i0 in range(1, len(a) - 1):
        lhs.append(sum(1 / (a[i0] - ai) for i, ai in enumerate(a) if i != i0))
        rhs.append(sum(1 / (a[i0] - bi) for bi in b))
    return ContinuityResult(all(l == r for l, r in zip(lhs, rhs)), tuple(lhs), tuple(rhs))


# ---------------------------------------------------------------------------
# frozen boundary curve


def _sigma(shape, s):
    s = np.asarray(s, dtype=float)[..., None]
    return (1.0 / (s - shape.xa)).sum(-1) - (1.0 / (s - shape.xb)).sum(-1)


def _sigma_dot(shape, s):
    s = np.asarray(s, dtype=float)[..., None]
    return -(1.0 / (s - shape.xa) ** 2).sum(-1) + (1.0 / (s - shape.xb) ** 2).sum(-1)


def _G(shape, s):
    s = np.asarray(s, dtype=float)[..., None]
    return np.prod(s - shape.xb, -1) / np.prod(s - shape.xa, -1)


def boundary_point(shape, s):
    """``(x(s), t(s))`` on the frozen boundary curve."""
    shape = NormalizedShape.of(shape)
    sig = _sigma(shape, s)
    return s - 1.0 / sig, 1.0 - _G(shape, s) / sig


def default_s_grid(shape, per_gap: int = 400, guard: float = 1e-6) -> np.ndarray:
    """Parameter grid clustered at the poles, including the two outer rays."""
    shape = NormalizedShape.of(shape)
    poles = np.sort(np.concatenate([shape.xa, shape.xb]))
    theta = np.linspace(0.0, np.pi, per_gap)
    parts = []
    for lo, hi in zip(poles[:-1], poles[1:]):
        width = hi - lo - 2 * guard
        parts.append(lo + guard + width * 0.5 * (1 - np.cos(theta)))
    tail = np.geomspace(guard, 50.0 * (poles[-1] - poles[0]), per_gap)
    parts += [poles[0] - tail[::-1], poles[-1] + tail]
    return np.concatenate(parts)


def frozen_boundary(shape, s_grid=None, guard: float = 1e-9) -> FrozenBoundary:
    """Sample the frozen boundary ``s -> (x(s), t(s))`` and locate its cusps."""
    shape = NormalizedShape.of(shape)
    if s_grid is None:
        s_grid = default_s_grid(shape)
    s = np.sort(np.asarray(s_grid, dtype=float))
    poles = np.sort(np.concatenate([shape.xa, shape.xb]))
    s = s[np.min(np.abs(s[:, None] - poles[None, :]), axis=1) > guard]
    with np.errstate(divide="ignore", invalid="ignore"):
        xs, ts = boundary_point(shape, s)
    lo, hi = shape.support
    keep = np.isfinite(xs) & np.isfinite(ts) & (ts >= 0) & (ts <= 1) & (xs >= lo) & (xs <= hi)
    dropped = int((~keep).sum())

    def xdot(u):
        return 1.0 + _sigma_dot(shape, u) / _sigma(shape, u) ** 2

    cusps = []
    gap = np.searchsorted(poles, s)
    sk, gk = s[keep], gap[keep]
    with np.errstate(divide="ignore", invalid="ignore"):
        xd = xdot(sk)
    for j in range(len(sk) - 1):
        if gk[j] != gk[j + 1] or not (np.isfinite(xd[j]) and np.isfinite(xd[j + 1])):
            continue
        if xd[j] == 0:
            cusps.append(float(sk[j]))
        elif xd[j] * xd[j + 1] < 0:
            cusps.append(float(brentq(xdot, sk[j], sk[j + 1], xtol=1e-14)))
    # interior minima: x -> eta*a_i with a vertical tangent; a cusp when the tangent direction
    # (proportional to xdot * (1, G)) reverses across the pole
    extra_s, extra_x, extra_t, extra_c = [], [], [], []
    scale = max(1.0, hi - lo)
    for i in range(1, shape.m):
        a = float(shape.xa[i])
        d = 1e-4 * scale
        flips = np.sign(xdot(a - d) * _G(shape, a - d)) != np.sign(xdot(a + d) * _G(shape, a + d))
        others = np.delete(shape.xa, i)
        t_lim = 1.0 - np.prod(a - shape.xb) / np.prod(a - others)
        if 0.0 <= t_lim <= 1.0:
            extra_s.append(a)
            extra_x.append(a)
            extra_t.append(float(t_lim))
            extra_c.append(bool(flips))
            if flips:
                cusps.append(a)
    cusps = sorted(set(cusps))
    in_gap = [c for c in cusps if c not in extra_s]
    s_all = np.concatenate([sk, in_gap, extra_s])
    flag = np.concatenate([np.zeros(len(sk), bool), np.ones(len(in_gap), bool), np.array(extra_c, bool)])
    order = np.argsort(s_all, kind="stable")
    s_all, flag = s_all[order], flag[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        xo, to = boundary_point(shape, s_all)
    pole = np.isin(s_all, extra_s)
    xo[pole] = np.array(extra_x)[np.searchsorted(extra_s, s_all[pole])] if pole.any() else xo[pole]
    to[pole] = np.array(extra_t)[np.searchsorted(extra_s, s_all[pole])] if pole.any() else to[pole]
    return FrozenBoundary(s_all, xo, to, flag, tuple(cusps), tuple(float(p) for p in poles), dropped)


# ---------------------------------------------------------------------------
# rectangle and L-shape closed forms


def _rect_radicand(r, x, s):
    sr = math.sqrt(r)
    return s * (4 * r - (1 + r) ** 2 * s) + 2 * (r - 1) * sr * s * x - r * x * x


def rect_height(r, x: float, t: float, abstol: float = DEFAULT_ABSTOL) -> float:
    """Limiting height for the rectangle with side ratio ``r``, normalized to area 2.

    The rectangle occupies ``x`` in ``[-1/sqrt(r), sqrt(r)]``; the integrand is
    the closed-form density, integrated between the two roots of its radicand.
    """
    r = float(Fraction(r)) if not isinstance(r, float) else r
    if r <= 0:
        raise ShapeError("r must be positive")
    sr = math.sqrt(r)
    if not -1 / sr - 1e-12 <= x <= sr + 1e-12 or not 0 <= t <= 1:
        raise ValueError(f"(x, t)=({x}, {t}) outside the rectangle strip")
    # radicand = A s^2 + B s + C
    A = -(1 + r) ** 2
    B = 4 * r + 2 * (r - 1) * sr * x
    C = -r * x * x
    disc = B * B - 4 * A * C
    if disc <= 0:
        return 0.0
    root = math.sqrt(disc)
    s1, s2 = sorted(((-B + root) / (2 * A), (-B - root) / (2 * A)))
    s1, s2 = max(s1, 0.0), min(s2, 1.0)
    if s2 <= s1:
        return 0.0

    def f(s):
        rad = np.maximum(_rect_radicand(r, x, s), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.sqrt(rad) / (2 * sr * (1 - s) * s)
        return np.where(rad > 0, v, 0.0)

    return sin2_integrate(f, s1, s2, t, abstol) / math.pi


def rectangle(r) -> InterlacingDiagram:
    """Integer diagram for the rectangle ``a = (-1, r)``, ``b = (r - 1,)``."""
    r = Fraction(r)
    diag, _ = from_rational((-1, r), (r - 1,))
    return diag


def _rational(v, name):
    if isinstance(v, float) or not isinstance(v, (int, Fraction, str)) or isinstance(v, bool):
        raise ShapeError(f"{name}={v!r} must be an exact rational (int, Fraction or 'p/q' string)")
    return Fraction(v)


@dataclass(frozen=True)
class LShapeParams:
    p: Fraction
    q: Fraction
    r: Fraction

    def __post_init__(self):
        p, q, r = (_rational(v, n) for v, n in ((self.p, "p"), (self.q, "q"), (self.r, "r")))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        if not r > 0:
            raise ShapeError(f"r={r} must be positive")
        if not -1 < p < r:
            raise ShapeError(f"p={p} must lie in (-1, r)")
        if not abs(p) < q <= min(p + 2, 2 * r - p):
            raise ShapeError(f"q={q} must satisfy |p| < q <= min(p+2, 2r-p)")


def lshape_from_pqr(params: LShapeParams) -> InterlacingDiagram:
    """Integer diagram with ``a = (-1, p, r)``, ``b = ((p+q-2)/2, (p-q+2r)/2)`` after clearing denominators.

    On the edges ``q = p + 2`` or ``q = 2r - p`` a corner degenerates and the
    result is a rectangle.
    """
    if not isinstance(params, LShapeParams):
        params = LShapeParams(*params)
    p, q, r = params.p, params.q, params.r
    diag, _ = from_rational((-1, p, r), ((p + q - 2) / 2, (p - q + 2 * r) / 2), collapse=True)
    return diag


def phase_curve_Q(p: float) -> float:
    rad = 2.0 - p * p
    if rad < 0:
        raise ValueError(f"2 - p^2 < 0 at p={p}")
    return 2.0 - math.sqrt(rad)


def phase_curve_Qpm(r: float, p: float, sign: int) -> float:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rad = (1 + p - r) * (1 + 2 * p - r) * (p * r + (1 + r) ** 2 - p - 2 * p * p)
    den = 1 + 2 * p - r
    if rad < 0:
        raise ValueError(f"negative radicand at (r, p)=({r}, {p})")
    if den == 0:
        raise ValueError(f"vanishing denominator at (r, p)=({r}, {p})")
    return 1 + r + sign * math.sqrt(rad) / den


def rational_Q_point(u) -> tuple[Fraction, Fraction]:
    """Exact rational point ``(p, Q(p))`` of the unit-ratio phase curve from a rational parameter u."""
    u = Fraction(u)
    den = u * u + 1
    return (u * u + 2 * u - 1) / den, 1 + 2 * u * (u - 1) / den
