from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from tableau_limits.diagram import (
    HEART,
    PIPE,
    SQUARE,
    InterlacingDiagram,
    NormalizedShape,
    Partition,
    dilate,
    from_rational,
    in_domain,
    interlacing_from_partition,
    load_shape,
    partition_from_interlacing,
    profile_omega,
    size,
)
from tableau_limits.errors import ShapeError

partitions = st.lists(st.integers(1, 12), min_size=1, max_size=8).map(lambda r: tuple(sorted(r, reverse=True)))


@pytest.mark.parametrize("rows, a, b", [
    ((1,), (-1, 1), (0,)),
    ((2, 1), (-2, 0, 2), (-1, 1)),
    ((2, 2), (-2, 2), (0,)),
    ((3,), (-1, 3), (2,)),
    ((1, 1, 1), (-3, 1), (-2,)),
])
def test_interlacing_of_small_partitions(rows, a, b):
    d = interlacing_from_partition(rows)
    assert (d.a, d.b) == (a, b)


@given(partitions)
def test_partition_round_trip(rows):
    d = interlacing_from_partition(rows)
    assert partition_from_interlacing(d).rows == rows
    assert size(d) == sum(rows)
    assert sum(d.a) == sum(d.b)


@given(partitions, st.integers(1, 5))
def test_dilation_scales_size(rows, n):
    d = interlacing_from_partition(rows)
    assert size(dilate(d, n)) == n * n * size(d)
    assert partition_from_interlacing(dilate(d, n)).rows == tuple(r * n for r in rows for _ in range(n))


@pytest.mark.parametrize("d, cells", [(HEART, 13), (PIPE, 9900), (SQUARE, 1)])
def test_builtin_sizes(d, cells):
    assert size(d) == cells


def test_heart_rows():
    assert partition_from_interlacing(HEART).rows == (5, 5, 1, 1, 1)


@pytest.mark.parametrize("a, b", [
    ((-1, 1), (2,)),
    ((-2, 0, 2), (-1,)),
    ((-2, 1), (0,)),
    ((0, 0), (0,)),
])
def test_invalid_interlacing_rejected(a, b):
    with pytest.raises(ShapeError):
        InterlacingDiagram(a, b)


@pytest.mark.parametrize("rows", [(), (0,), (1, 2), (2, -1)])
def test_invalid_partition_rejected(rows):
    with pytest.raises(ShapeError):
        Partition(rows)


def test_noninteger_coordinates_rejected():
    with pytest.raises(ShapeError):
        InterlacingDiagram((-1.5, 1.5), (0,))


@given(partitions, st.floats(-30, 30))
def test_profile_is_lipschitz_and_dominates_abs(rows, x):
    sh = NormalizedShape.of(rows)
    w = profile_omega(sh, x)
    assert w >= abs(x) - 1e-12
    assert abs(profile_omega(sh, x + 1e-3) - w) <= 1e-3 + 1e-12


@given(partitions)
@settings(max_examples=50)
def test_normalized_area_is_two(rows):
    sh = NormalizedShape.of(rows)
    lo, hi = sh.support
    xs = np.sort(np.concatenate([np.linspace(lo, hi, 2001), sh.xa, sh.xb, [0.0]]))
    assert trapezoid(sh.omega(xs) - np.abs(xs), xs) == pytest.approx(2.0, rel=1e-12)


def test_profile_outside_support_is_abs():
    sh = NormalizedShape(HEART)
    xs = np.array([-3.0, -2.0, 2.0, 5.0])
    assert np.allclose(sh.omega(xs), np.abs(xs))


def test_in_domain_strict():
    sh = NormalizedShape(SQUARE)
    assert in_domain(sh, 0.0, 0.5)
    assert not in_domain(sh, 0.0, 2.0)
    assert not in_domain(sh, 0.5, 0.5)


def test_from_rational_clears_denominators():
    d, mult = from_rational((Fraction(-3, 2), 0, Fraction(3, 2)), (Fraction(-1, 2), Fraction(1, 2)))
    assert mult == 2
    assert d.a == (-3, 0, 3) and d.b == (-1, 1)


def test_from_rational_collapse_removes_degenerate_corner():
    d, mult = from_rational((-1, 0, 1), (0, 0), collapse=True)
    assert d == SQUARE and mult == 1


def test_load_shape_forms(tmp_path):
    assert load_shape({"rows": [5, 5, 1, 1, 1]}) == HEART
    assert load_shape('{"a": [-1, 1], "b": [0]}') == SQUARE
    path = tmp_path / "s.json"
    path.write_text('{"a": ["-1/2", "1/2"], "b": [0]}')
    assert load_shape(path) == SQUARE
    with pytest.raises(ShapeError):
        load_shape({"cols": [1]})
