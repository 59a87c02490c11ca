import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tableau_limits.errors import RootFindingError
from tableau_limits.roots import aberth, polyval


def _match(found, expected):
    """Largest distance after greedy nearest matching."""
    rest = list(expected)
    worst = 0.0
    for z in found:
        k = int(np.argmin([abs(z - r) for r in rest]))
        worst = max(worst, abs(z - rest.pop(k)))
    return worst


@pytest.mark.parametrize("roots", [
    [1.0, 2.0, 3.0],
    [-1.0, 1j, -1j],
    [0.5, 0.5 + 2j, 0.5 - 2j, -3.0],
    [1e-3, -1e-3, 10.0],
])
def test_known_roots(roots):
    found = aberth(np.poly(roots))
    assert _match(found, roots) < 1e-10


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
@settings(max_examples=200)
def test_against_companion_matrix(coeff_tail):
    coeffs = np.array([1.0] + coeff_tail, dtype=complex)
    found = aberth(coeffs)
    ref = np.roots(coeffs)
    scale = 1 + np.abs(ref).max()
    # separated roots are accurate to near machine precision; clustered ones to sqrt(eps)
    assert _match(found, ref) < 1e-6 * scale
    assert np.abs(polyval(coeffs, found)).max() <= 1e-10 * np.abs(coeffs).max() * scale ** len(coeff_tail)


def test_batched_matches_single():
    rng = np.random.default_rng(3)
    c = rng.normal(size=(20, 6))
    batch = aberth(c)
    for row, r in zip(c, batch):
        assert _match(r, aberth(row)) < 1e-12


def test_double_root_converges():
    found = aberth(np.poly([2.0, 2.0, -1.0]))
    assert _match(found, [2.0, 2.0, -1.0]) < 1e-7


def test_zero_leading_coefficient():
    with pytest.raises(RootFindingError):
        aberth([0.0, 1.0, 2.0])


def test_linear_and_constant():
    assert aberth([2.0, -4.0])[0] == pytest.approx(2.0)
    assert aberth([3.0]).size == 0
