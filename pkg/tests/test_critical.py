import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tableau_limits.critical import (
    DEGENERATE_EDGE,
    FROZEN,
    LARGE_T,
    LIQUID,
    SMALL_T,
    alpha_on_column,
    build_critical_poly,
    burgers_residual,
    classify_degenerate,
    degenerate_column,
    discriminant_sign,
    localize_real_roots,
    solve_critical,
    t_minus,
    t_plus,
    uc_field,
)
from tableau_limits.diagram import HEART, PIPE, SQUARE, InterlacingDiagram, NormalizedShape
from tableau_limits.errors import FrozenPointError

HEART_N = NormalizedShape(HEART)
SQUARE_N = NormalizedShape(SQUARE)
# a = (-2, 0, 3), b = (-1, 2): size 4, eta = 1/2
SMALL = NormalizedShape(InterlacingDiagram((-2, 0, 3), (-1, 2)))


def _square_liquid_window(x):
    """Exact t-interval where the square's critical quadratic has complex roots."""
    U, t = sp.symbols("U t")
    xr = sp.Rational(x)
    P = sp.expand(U * (U + xr) - (1 - t) * (U + xr + 1) * (U + xr - 1))
    disc = sp.discriminant(P, U)
    ts = sorted(float(r) for r in sp.solve(disc, t) if r.is_real and 0 <= r <= 1)
    return ts


@pytest.mark.parametrize("x", ["0", "1/2", "-1/3", "3/4"])
def test_square_transitions_match_exact_discriminant(x):
    lo, hi = _square_liquid_window(x)
    xf = float(sp.Rational(x))
    assert t_minus(SQUARE_N, xf) == pytest.approx(lo, abs=1e-9)
    assert t_plus(SQUARE_N, xf) == pytest.approx(hi, abs=1e-9)
    assert not solve_critical(SQUARE_N, xf, max(lo - 1e-4, 0.0)).liquid
    assert solve_critical(SQUARE_N, xf, 0.5 * (lo + hi)).liquid
    assert not solve_critical(SQUARE_N, xf, min(hi + 1e-4, 1.0)).liquid


def test_square_half_point_closed_form():
    assert t_minus(SQUARE_N, 0.5) == pytest.approx((2 - math.sqrt(3)) / 4, abs=1e-12)
    assert t_plus(SQUARE_N, 0.5) == pytest.approx((2 + math.sqrt(3)) / 4, abs=1e-12)


def test_square_center():
    c = solve_critical(SQUARE_N, 0.0, 0.5)
    assert c.verdict == LIQUID
    assert c.U_c == pytest.approx(1j, abs=1e-12)
    assert c.alpha == pytest.approx(2.0, abs=1e-12)
    assert c.beta == pytest.approx(0.0, abs=1e-12)


def test_leading_coefficient_is_t_and_dropped_at_zero():
    p = build_critical_poly(SMALL, -0.9, 0.3)
    assert p.degree == SMALL.m + 1
    assert p.coeffs[0] == pytest.approx(0.3)
    assert build_critical_poly(SMALL, -0.9, 0.0).degree == SMALL.m


@pytest.mark.parametrize("t, verdict, reals", [
    (0.3, FROZEN, [-1.0190, -0.3210]),
    (0.6, LIQUID, None),
    (0.9, FROZEN, [0.0440, 0.2930, 1.8600]),
])
def test_small_shape_reference_points(t, verdict, reals):
    c = solve_critical(SMALL, -0.9, t)
    assert c.verdict == verdict
    if reals is not None:
        found = np.sort(c.roots.real)
        for r in reals:
            assert np.min(np.abs(found - r)) < 5e-3
    localize_real_roots(SMALL, -0.9, t)


@given(st.floats(-1.38, 1.38), st.floats(0.01, 0.99))
@settings(max_examples=150, deadline=None)
def test_roots_are_roots_and_verdict_consistent(x, t):
    if degenerate_column(HEART_N, x) is not None:
        return
    c = solve_critical(HEART_N, x, t)
    p = build_critical_poly(HEART_N, x, t)
    assert np.abs(p(c.roots)).max() <= 1e-10 * np.abs(p.coeffs).max()
    nonreal = np.abs(c.roots.imag) > 1e-8 * (1 + np.abs(c.roots))
    assert c.liquid == (nonreal.sum() == 2)
    if c.liquid:
        assert c.alpha > 0 and -1 < c.beta < 1
        assert c.U_c.imag > 0
        assert discriminant_sign(HEART_N, x, t) == -1
    else:
        assert c.alpha == 0.0
    localize_real_roots(HEART_N, x, t)


@pytest.mark.parametrize("x", [-1.0, -0.3, 0.2, 0.9])
def test_alpha_on_column_matches_pointwise(x):
    ts = np.linspace(0.0, 1.0, 41)
    col = alpha_on_column(HEART_N, x, ts)
    pts = [solve_critical(HEART_N, x, float(t)).alpha for t in ts]
    assert np.allclose(col, pts, atol=1e-12)


def test_edges_and_boundary_lines_frozen():
    lo, hi = HEART_N.support
    assert solve_critical(HEART_N, lo, 0.5).regime == DEGENERATE_EDGE
    assert solve_critical(HEART_N, hi, 0.5).verdict == FROZEN
    assert solve_critical(HEART_N, 0.1, 0.0).regime == SMALL_T
    assert solve_critical(HEART_N, 0.1, 1.0).regime == LARGE_T


def test_degenerate_column_is_continuous_limit():
    k = 1
    x = float(HEART_N.xa[k])
    for t in (0.3, 0.45, 0.7):
        c = classify_degenerate(HEART_N, k, t)
        near = solve_critical(HEART_N, x + 1e-7, t)
        assert c.liquid == near.liquid
        if c.liquid:
            assert c.U_c == pytest.approx(near.U_c, abs=1e-5)


def test_origin_at_zero_height():
    # two leading coefficients vanish at (0, 0)
    c = solve_critical(SQUARE_N, 0.0, 0.0)
    assert c.verdict == FROZEN and c.roots.size == 0


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        solve_critical(HEART_N, 5.0, 0.5)
    with pytest.raises(ValueError):
        solve_critical(HEART_N, 0.0, 1.5)


def test_uc_field_nan_where_frozen():
    f = uc_field(SQUARE_N, [0.0, 0.99], [0.5, 0.01])
    assert f[0, 0] == pytest.approx(1j)
    assert np.isnan(f[1, 1])


@pytest.mark.parametrize("x, t", [(0.0, 0.5), (0.2, 0.4), (-0.5, 0.6)])
def test_burgers_residual_second_order(x, t):
    sh = SQUARE_N if x != -0.5 else NormalizedShape(PIPE)
    r1 = abs(burgers_residual(sh, x, t, 1e-3))
    r2 = abs(burgers_residual(sh, x, t, 5e-4))
    assert r1 < 1e-4
    if r1 > 1e-9:
        assert 3.5 < r1 / r2 < 4.5


def test_burgers_on_frozen_stencil_raises():
    with pytest.raises(FrozenPointError):
        burgers_residual(SQUARE_N, 0.9, 0.05, 1e-3)
