"""Aberth-Ehrlich simultaneous iteration for batches of small-degree polynomials."""
from __future__ import annotations

import numpy as np

from .errors import RootFindingError

EPS = np.finfo(float).eps


def _horner(c, z):
    p = np.broadcast_to(c[:, :1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for k in range(1, c.shape[1]):
        dp = dp * z + p
        p = p * z + c[:, k:k + 1]
    return p, dp


def _horner_abs(c, r):
    out = np.broadcast_to(np.abs(c[:, :1]), r.shape).astype(float)
    for k in range(1, c.shape[1]):
        out = out * r + np.abs(c[:, k:k + 1])
    return out


def aberth(coeffs, maxiter: int = 200, tol: float = 1e-13) -> np.ndarray:
    """All roots of each polynomial in ``coeffs`` (highest degree first).

    ``coeffs`` is 1-D for a single polynomial or 2-D ``(batch, degree+1)``.
    Iterates until every root's correction is below ``tol * (1 + |z|)`` or its
    residual is at rounding level, then applies one Newton polish. Raises
    RootFindingError when ``maxiter`` is exhausted.
    """
    single = np.ndim(coeffs) == 1
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    if np.any(c[:, 0] == 0):
        raise RootFindingError("leading coefficient is zero")
    batch, n1 = c.shape
    n = n1 - 1
    if n < 1:
        out = np.empty((batch, 0), complex)
        return out[0] if single else out
    c = c / c[:, :1]
    if n == 1:
        out = -c[:, 1:2]
        return out[0] if single else out

    radius = 1.0 + np.abs(c[:, 1:]).max(axis=1)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius[:, None] * np.exp(1j * angles)[None, :]
    done = np.zeros(z.shape, bool)
    eye = np.eye(n, dtype=bool)

    for _ in range(maxiter):
        p, dp = _horner(c, z)
        small_res = np.abs(p) <= 8 * EPS * _horner_abs(c, np.abs(z))
        done |= small_res
        if done.all():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = z[:, :, None] - z[:, None, :]
            diff[:, eye] = np.inf
            repulse = (1.0 / diff).sum(axis=2)
            ratio = p / dp
            step = ratio / (1.0 - ratio * repulse)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + np.abs(z[bad]))
        step[done] = 0.0
        z = z - step
        done |= np.abs(step) < tol * (1.0 + np.abs(z))
    else:
        rows = np.flatnonzero(~done.all(axis=1))
        raise RootFindingError(f"Aberth iteration did not converge in {maxiter} steps (rows {rows[:5].tolist()})")

    # one guarded Newton polish
    p, dp = _horner(c, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = z - p / dp
    ok = np.isfinite(cand)
    pc, _ = _horner(c, np.where(ok, cand, z))
    better = ok & (np.abs(pc) < np.abs(p))
    z = np.where(better, cand, z)
    return z[0] if single else z


def polyval(coeffs, z):
    """Evaluate a highest-first coefficient list at ``z``."""
    return np.polyval(np.asarray(coeffs), z)
