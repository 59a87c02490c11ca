"""Complex log-gamma by the Lanczos approximation (g = 7, 9 terms) with reflection."""
from __future__ import annotations

import numpy as np

_G = 7.0
_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)
_LOG_PI = np.log(np.pi)


def _lanczos(z):
    # log Gamma(z) for Re z >= 1/2
    zm = z - 1.0
    acc = np.full(zm.shape, _P[0], dtype=complex)
    for i in range(1, len(_P)):
        acc = acc + _P[i] / (zm + i)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def log_sin_pi(z):
    """``log(sin(pi z))`` without overflow for large ``|Im z|`` (any branch)."""
    w = np.pi * np.asarray(z, dtype=complex)
    up = w.imag > 1.0
    dn = w.imag < -1.0
    mid = ~(up | dn)
    out = np.empty(w.shape, dtype=complex)
    out[mid] = np.log(np.sin(w[mid]))
    if up.any():
        wu = w[up]
        out[up] = -1j * wu + np.log(0.5j) + np.log1p(-np.exp(2j * wu))
    if dn.any():
        wd = w[dn]
        out[dn] = 1j * wd - np.log(2j) + np.log1p(-np.exp(-2j * wd))
    return out


def log_gamma_complex(z):
    """A logarithm of ``Gamma(z)`` for complex ``z`` (vectorized).

    The branch is not the principal one in general; ``exp`` of the result is
    ``Gamma(z)``. Raises ValueError at the poles ``0, -1, -2, ...``.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    near = (np.abs(z.imag) < 1e-14) & (z.real < 0.5) & (np.abs(z.real - np.round(z.real)) < 1e-14)
    if near.any():
        raise ValueError(f"Gamma has a pole at {z[near][0].real:g}")
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    out[right] = _lanczos(z[right])
    if (~right).any():
        zl = z[~right]
        out[~right] = _LOG_PI - log_sin_pi(zl) - _lanczos(1.0 - zl)
    return out[0] if scalar else out
