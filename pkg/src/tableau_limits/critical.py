"""The critical equation at a point (x, t) and the liquid/frozen classification.

For a normalized shape with scaled coordinates ``xa = eta*a`` and ``xb = eta*b``
the critical polynomial is

    P(U) = U * prod(x - xb_i + U) - (1 - t) * prod(x - xa_i + U),

of degree m+1 with leading coefficient t. The point is liquid when P has a
pair of non-real roots; the root ``U_c`` in the upper half plane gives the
local intensity ``alpha = Im U_c / (1 - t)`` and skewness
``beta = Re U_c / |U_c|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .diagram import NormalizedShape
from .errors import FrozenPointError, LocalizationError, NumericalError
from .roots import aberth

LIQUID = "Liquid"
FROZEN = "Frozen"

SMALL_T = "SmallT"
LARGE_T = "LargeT"
INTERMEDIATE_T = "IntermediateT"
DEGENERATE_EDGE = "DegenerateEdge"

# a root counts as real when |Im| <= REAL_RTOL * (1 + |root|)
REAL_RTOL = 1e-8
BISECT_STEPS = 60


@dataclass(frozen=True)
class CriticalPoly:
    coeffs: np.ndarray
    shape: NormalizedShape
    x: float
    t: float
    # index k when x == eta*a_k and the common factor U was cancelled
    degenerate_index: int | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, U):
        return np.polyval(self.coeffs, U)


@dataclass(frozen=True)
class PhaseClassification:
    x: float
    t: float
    roots: np.ndarray
    verdict: str
    U_c: complex | None = None
    alpha: float = 0.0
    beta: float | None = None
    regime: str | None = None

    @property
    def liquid(self) -> bool:
        return self.verdict == LIQUID


@dataclass(frozen=True)
class RootInterval:
    lo: float
    hi: float
    expect: str  # "none" or "at_least_one"
    count: int


def degenerate_column(shape, x: float, rtol: float = 1e-12) -> int | None:
    """Index k with ``x == eta*a_k`` (to rounding), else None."""
    shape = NormalizedShape.of(shape)
    hit = np.flatnonzero(np.abs(shape.xa - x) <= rtol * max(1.0, abs(x)))
    return int(hit[0]) if hit.size else None


def _check_point(shape, x, t):
    lo, hi = shape.support
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= x <= hi + slack):
        raise ValueError(f"x={x} outside [{lo}, {hi}]")
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t={t} outside [0, 1]")


def _factors(shape, x, k):
    """Monic left/right factor coefficient lists, with the U factor cancelled when k is given."""
    left_roots = list(shape.xb - x)
    right_roots = list(shape.xa - x)
    if k is None:
        left_roots.append(0.0)
    else:
        del right_roots[k]
    return np.poly(left_roots).real, np.poly(right_roots).real


def _coeff_matrix(shape, x, ts, k=None):
    L, R = _factors(shape, x, k)
    ts = np.asarray(ts, dtype=float)
    C = L[None, :] - (1.0 - ts)[:, None] * R[None, :]
    C[:, 0] = ts
    return C


def build_critical_poly(shape, x: float, t: float) -> CriticalPoly:
    """Expanded critical polynomial (highest degree first).

    At t == 0 the leading coefficient vanishes identically and is dropped. When
    x coincides with a scaled minimum ``eta*a_k`` the common factor U is removed.
    """
    shape = NormalizedShape.of(shape)
    _check_point(shape, x, t)
    k = degenerate_column(shape, x)
    if k is not None:
        x = float(shape.xa[k])
    c = _coeff_matrix(shape, x, [t], k)[0]
    if t == 0.0:
        c = c[1:]
    return CriticalPoly(c, shape, float(x), float(t), k)


def _is_real(roots):
    return np.abs(roots.imag) <= REAL_RTOL * (1.0 + np.abs(roots))


def _interior_interval(shape, x, k):
    """The open interval that holds the two large-t roots."""
    if k is None:
        i0 = int(np.searchsorted(shape.xa, x))
        return shape.xa[i0 - 1] - x, shape.xa[i0] - x
    return shape.xb[k - 1] - x, shape.xb[k] - x


def _regime(shape, x, real_roots, k):
    if k is not None and k in (0, shape.m):
        return DEGENERATE_EDGE
    lo, hi = shape.xa[0] - x, shape.xa[-1] - x
    outside = np.count_nonzero((real_roots <= lo) | (real_roots >= hi))
    if outside == 2:
        return SMALL_T
    ilo, ihi = _interior_interval(shape, x, k)
    inside = np.count_nonzero((real_roots > ilo) & (real_roots < ihi))
    if inside == 2:
        return LARGE_T
    return INTERMEDIATE_T


def _classify(shape, x, t, roots, k) -> PhaseClassification:
    real = _is_real(roots)
    n_complex = int(np.count_nonzero(~real))
    if n_complex not in (0, 2):
        raise NumericalError(f"{n_complex} non-real roots at (x={x}, t={t}); expected 0 or 2")
    edge = k is not None and k in (0, shape.m)
    if n_complex == 2 and not edge:
        pair = roots[~real]
        top = pair[np.argmax(pair.imag)]
        bottom = pair[np.argmin(pair.imag)]
        U_c = complex(0.5 * (top.real + bottom.real), 0.5 * (top.imag - bottom.imag))
        out = np.concatenate([np.sort(roots[real].real).astype(complex), [U_c, U_c.conjugate()]])
        return PhaseClassification(x, t, out, LIQUID, U_c, U_c.imag / (1.0 - t), U_c.real / abs(U_c), None)
    rr = np.sort(roots.real)
    return PhaseClassification(x, t, rr.astype(complex), FROZEN, None, 0.0, None, _regime(shape, x, rr, k))


def _trimmed_roots(c):
    # at t = 0 further leading coefficients can vanish (e.g. the U^m term at x = 0)
    c = np.asarray(c)
    scale = np.abs(c).max() if c.size else 0.0
    nz = np.flatnonzero(np.abs(c) > 1e-14 * scale)
    c = c[nz[0]:] if nz.size else c[:0]
    return aberth(c) if len(c) > 1 else np.empty(0, complex)


def solve_critical(shape, x: float, t: float) -> PhaseClassification:
    """Solve the critical equation at (x, t) and classify the point.

    The lines t = 0, t = 1 and the outer columns x = eta*a_0, x = eta*a_m are
    frozen by construction. Interior columns x = eta*a_k are routed through
    :func:`classify_degenerate`.
    """
    shape = NormalizedShape.of(shape)
    _check_point(shape, x, t)
    k = degenerate_column(shape, x)
    if k is not None:
        return classify_degenerate(shape, k, t)
    if t == 1.0:
        roots = np.sort(np.concatenate([[0.0], shape.xb - x]))
        return PhaseClassification(x, t, roots.astype(complex), FROZEN, regime=LARGE_T)
    poly = build_critical_poly(shape, x, t)
    if t == 0.0:
        rr = np.sort(_trimmed_roots(poly.coeffs).real)
        return PhaseClassification(x, t, rr.astype(complex), FROZEN, regime=SMALL_T)
    return _classify(shape, x, t, aberth(poly.coeffs), None)


def classify_degenerate(shape, k: int, t: float) -> PhaseClassification:
    """Classification on the column ``x = eta*a_k`` where P loses its factor U.

    The reduced polynomial has degree m. The outer columns (k = 0 or m) are
    always frozen.
    """
    shape = NormalizedShape.of(shape)
    if not 0 <= k <= shape.m:
        raise ValueError(f"no minimum a_{k} in a shape with m={shape.m}")
    x = float(shape.xa[k])
    c = _coeff_matrix(shape, x, [t], k)[0]
    if t == 0.0:
        c = c[1:]
    roots = _trimmed_roots(c)
    edge = k in (0, shape.m)
    if edge or t in (0.0, 1.0):
        rr = np.sort(roots.real)
        regime = DEGENERATE_EDGE if edge else (SMALL_T if t == 0.0 else LARGE_T)
        return PhaseClassification(x, t, rr.astype(complex), FROZEN, regime=regime)
    return _classify(shape, x, t, roots, k)


def alpha_on_column(shape, x: float, ts) -> np.ndarray:
    """Vectorized ``alpha(x, t)`` for many t on one vertical line (0 where frozen)."""
    shape = NormalizedShape.of(shape)
    ts = np.asarray(ts, dtype=float)
    out = np.zeros(ts.shape)
    k = degenerate_column(shape, x)
    if k is not None:
        if k in (0, shape.m):
            return out
        x = float(shape.xa[k])
    inner = (ts > 0.0) & (ts < 1.0)
    if not inner.any():
        return out
    tin = ts[inner]
    roots = aberth(_coeff_matrix(shape, x, tin, k))
    nonreal = ~_is_real(roots)
    counts = nonreal.sum(axis=1)
    if np.any((counts != 0) & (counts != 2)):
        bad = tin[(counts != 0) & (counts != 2)][0]
        raise NumericalError(f"unexpected number of non-real roots at (x={x}, t={bad})")
    im = np.where(nonreal, np.abs(roots.imag), 0.0).max(axis=1)
    out[inner] = np.where(counts == 2, im / (1.0 - tin), 0.0)
    return out


def uc_field(shape, xs, ts) -> np.ndarray:
    """``U_c`` over a grid (NaN where frozen); shape ``(len(xs), len(ts))``."""
    out = np.full((len(xs), len(ts)), np.nan, dtype=complex)
    for i, x in enumerate(xs):
        for j, t in enumerate(ts):
            c = solve_critical(shape, float(x), float(t))
            if c.liquid:
                out[i, j] = c.U_c
    return out


def localize_real_roots(shape, x: float, t: float, tol: float = 1e-9) -> list[RootInterval]:
    """Count computed roots in the intervals where the sign argument locates them.

    For x in (eta*a_{i0-1}, eta*a_{i0}): for i < i0 there is no root in
    [xa_{i-1}-x, xb_i-x) and at least one in [xb_i-x, xa_i-x); for i > i0 no
    root in [xb_i-x, xa_i-x) and at least one in (xa_{i-1}-x, xb_i-x].
    Raises LocalizationError if the computed roots contradict this.
    """
    shape = NormalizedShape.of(shape)
    if degenerate_column(shape, x) is not None:
        raise ValueError("x is a degenerate column eta*a_k; use classify_degenerate")
    cls = solve_critical(shape, x, t)
    roots = cls.roots
    real = roots[_is_real(roots)].real
    xa, xb = shape.xa - x, shape.xb - x
    i0 = int(np.searchsorted(shape.xa, x))
    out = []
    for i in range(1, shape.m + 1):
        if i < i0:
            spans = [(xa[i - 1], xb[i - 1], "none"), (xb[i - 1], xa[i], "at_least_one")]
        elif i > i0:
            spans = [(xb[i - 1], xa[i], "none"), (xa[i - 1], xb[i - 1], "at_least_one")]
        else:
            continue
        for lo, hi, expect in spans:
            if expect == "none":
                cnt = int(np.count_nonzero((real > lo + tol) & (real < hi - tol)))
                cnt += int(np.count_nonzero(~_is_real(roots) & (roots.real > lo) & (roots.real < hi)
                                            & (np.abs(roots.imag) <= tol)))
            else:
                cnt = int(np.count_nonzero((real >= lo - tol) & (real <= hi + tol)))
            if (expect == "none" and cnt) or (expect == "at_least_one" and not cnt):
                raise LocalizationError(
                    f"root count {cnt} in ({lo:.6g}, {hi:.6g}) contradicts '{expect}' at (x={x}, t={t})")
            out.append(RootInterval(float(lo), float(hi), expect, cnt))
    return out


def _two_outside(shape, x, t) -> bool:
    c = solve_critical(shape, x, t)
    r = c.roots[_is_real(c.roots)].real
    lo, hi = shape.xa[0] - x, shape.xa[-1] - x
    return np.count_nonzero((r <= lo) | (r >= hi)) == 2


def _two_inside(shape, x, t) -> bool:
    c = solve_critical(shape, x, t)
    r = c.roots[_is_real(c.roots)].real
    lo, hi = _interior_interval(shape, x, None)
    return np.count_nonzero((r > lo) & (r < hi)) == 2


def _interior_x(shape, x):
    lo, hi = shape.support
    if not lo < x < hi:
        raise ValueError(f"x={x} must lie strictly inside ({lo}, {hi})")
    if degenerate_column(shape, x) is not None:
        raise ValueError("x is a degenerate column eta*a_k; use classify_degenerate")


def t_minus(shape, x: float) -> float:
    """Largest t such that two real roots lie outside (xa_0 - x, xa_m - x)."""
    shape = NormalizedShape.of(shape)
    _interior_x(shape, x)
    lo, hi = 0.0, 1.0
    if _two_outside(shape, x, hi):
        raise NumericalError("bisection bracket failure for t_minus: predicate holds at t=1")
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _two_outside(shape, x, mid):
            lo = mid
        else:
            hi = mid
    return lo


def t_plus(shape, x: float) -> float:
    """Smallest t such that two real roots lie inside (xa_{i0-1} - x, xa_{i0} - x)."""
    shape = NormalizedShape.of(shape)
    _interior_x(shape, x)
    lo, hi = 0.0, 1.0
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _two_inside(shape, x, mid):
            hi = mid
        else:
            lo = mid
    return hi


def discriminant(shape, x: float, t: float) -> float:
    """``lead^(2n-2) * prod_{i<j} (r_i - r_j)^2`` from the numerically computed roots."""
    poly = build_critical_poly(shape, x, t)
    roots = aberth(poly.coeffs)
    n = len(roots)
    prod = complex(poly.coeffs[0]) ** (2 * n - 2)
    for ri, rj in combinations(roots, 2):
        prod *= (ri - rj) ** 2
    return prod.real


def discriminant_sign(shape, x: float, t: float, tol: float = 1e-9) -> int:
    """Sign of the discriminant of the critical polynomial, 0 when ``|Disc| <= tol``.

    -1 corresponds to a conjugate non-real pair (liquid).
    """
    if t <= 0:
        raise ValueError("discriminant_sign needs t > 0")
    d = discriminant(shape, x, t)
    if abs(d) <= tol:
        return 0
    return -1 if d < 0 else 1


def burgers_residual(shape, x: float, t: float, h: float) -> complex:
    """Central-difference residual of ``U_t + U (U_x + 1)/(1 - t)`` at (x, t)."""
    shape = NormalizedShape.of(shape)

    def uc(xx, tt):
        c = solve_critical(shape, xx, tt)
        if not c.liquid:
            raise FrozenPointError(f"stencil point ({xx}, {tt}) is frozen")
        return c.U_c

    u0 = uc(x, t)
    ut = (uc(x, t + h) - uc(x, t - h)) / (2 * h)
    ux = (uc(x + h, t) - uc(x - h, t)) / (2 * h)
    return ut + u0 * (ux + 1.0) / (1.0 - t)
