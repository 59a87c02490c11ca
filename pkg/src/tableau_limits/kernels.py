"""Correlation kernels of bead processes.

* the finite kernel of a Young diagram, as a double contour integral over
  circles evaluated by the trapezoidal rule;
* the bead kernel ``J_{alpha, beta}`` of the infinite bead process;
* the local limit kernel at a liquid point, together with the conjugation
  factor relating it to ``J_{alpha, beta}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .critical import solve_critical
from .diagram import InterlacingDiagram, Partition, interlacing_from_partition, partition_from_interlacing
from .errors import FrozenPointError, NumericalError
from .gamma import log_gamma_complex
from .quadrature import gk_integrate


@dataclass(frozen=True)
class SpaceTimePoint:
    x: int
    t: float


@dataclass(frozen=True)
class ContourSpec:
    """Circles for the w and z integrals.

    The default layout centres both circles at 0 with half-integer radii, the
    w circle inside the z circle when ``t1 >= t2``. For ``x1 <= x2`` the two pole
    sets are separated and disjoint circles may be used instead.
    """

    r_w: float
    r_z: float
    c_w: float = 0.0
    c_z: float = 0.0
    nodes: int = 64
    max_nodes: int = 2048
    tol: float = 1e-10

    @property
    def nested(self) -> bool:
        return self.c_w == self.c_z

    @property
    def w_inside(self) -> bool:
        return self.nested and self.r_w < self.r_z

    @classmethod
    def for_points(cls, d: InterlacingDiagram, p1: SpaceTimePoint, p2: SpaceTimePoint, **kw) -> "ContourSpec":
        """Origin-centred half-integer radii enclosing every pole; w inside z when ``t1 >= t2``."""
        p = partition_from_interlacing(d)
        r_in = max(p.length, p.rows[0], abs(p1.x), abs(p2.x)) + 0.5
        r_out = r_in + max(2, math.ceil(r_in / 2))
        if p1.t >= p2.t:
            return cls(r_in, r_out, **kw)
        return cls(r_out, r_in, **kw)

    @classmethod
    def separated(cls, d: InterlacingDiagram, p1: SpaceTimePoint, p2: SpaceTimePoint, **kw) -> "ContourSpec":
        """Disjoint circles around ``[a_0, x1 - 1]`` (w) and ``[x2, a_m - 1]`` (z); needs ``x1 <= x2``."""
        if p1.x > p2.x:
            raise ValueError("separated contours need x1 <= x2")
        gap = 0.35 if p1.x == p2.x else 0.5
        w_lo, w_hi = d.a[0] - 0.5, p1.x - 1 + gap
        z_lo, z_hi = p2.x - gap, d.a[-1] - 0.5
        return cls(0.5 * (w_hi - w_lo), 0.5 * (z_hi - z_lo), 0.5 * (w_hi + w_lo), 0.5 * (z_hi + z_lo), **kw)


def _diagram(d) -> InterlacingDiagram:
    if isinstance(d, InterlacingDiagram):
        return d
    return interlacing_from_partition(d if isinstance(d, Partition) else Partition(tuple(d)))


def F_lambda_log(d, u, pole_tol: float = 1e-6):
    """Log of ``prod Gamma(u - a_i + 1) / prod Gamma(u - b_i + 1)`` (vectorized in u).

    Near integers where the individual Gamma factors are singular but the
    quotient is finite, the equivalent form ``Gamma(u + l + 1) / prod_{i<=l} (u - lambda_i + i)``
    is used. Raises ValueError within ``pole_tol`` of a pole ``lambda_i - i``.
    """
    d = _diagram(d)
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    p = partition_from_interlacing(d)
    ell = p.length
    poles = np.array([r - i for i, r in enumerate(p.rows, start=1)], dtype=float)
    near_int = (np.abs(u.imag) < 1e-9) & (np.abs(u.real - np.round(u.real)) < 1e-9)
    k = np.round(u.real)
    true_pole = near_int & ((np.isin(k, poles)) | (k < -ell))
    dist = np.min(np.abs(u[:, None] - poles[None, :]), axis=1)
    if np.any(true_pole) or np.any(dist < pole_tol):
        raise ValueError("u is at a pole of F_lambda")
    out = np.empty(u.shape, dtype=complex)
    generic = ~(near_int & (k <= max(d.a) - 1))
    ug = u[generic]
    if ug.size:
        acc = np.zeros(ug.shape, dtype=complex)
        for a in d.a:
            acc += log_gamma_complex(ug - a + 1)
        for b in d.b:
            acc -= log_gamma_complex(ug - b + 1)
        out[generic] = acc
    us = u[~generic]
    if us.size:
        acc = log_gamma_complex(us + ell + 1)
        for i, r in enumerate(p.rows, start=1):
            acc -= np.log(us - r + i)
        out[~generic] = acc
    return out


def _circle(c, r, m):
    return c + r * np.exp(2j * np.pi * (np.arange(m) + 0.5) / m)


def _finite_kernel_nodes(d, p1, p2, spec, m):
    z = _circle(spec.c_z, spec.r_z, m)
    w = _circle(spec.c_w, spec.r_w, m)
    log_a = F_lambda_log(d, z) - log_gamma_complex(z - p2.x + 1) + np.log(z - spec.c_z)
    log_b = log_gamma_complex(w - p1.x + 1) - F_lambda_log(d, w) + np.log(w - spec.c_w)
    if p2.t > 0:
        log_a = log_a + (z - p2.x) * math.log1p(-p2.t)
    if p1.t > 0:
        log_b = log_b + (p1.x - 1 - w) * math.log1p(-p1.t)
    A = np.exp(log_a)
    B = np.exp(log_b)
    C = 1.0 / (z[:, None] - w[None, :])
    return -(A @ C @ B) / (m * m)


def finite_kernel(d, p1: SpaceTimePoint, p2: SpaceTimePoint, spec: ContourSpec | None = None) -> float:
    """Finite correlation kernel ``K_lambda((x1, t1), (x2, t2))`` for ``t1, t2`` in ``[0, 1)``.

    The node count doubles until two successive trapezoidal values agree to
    ``spec.tol`` (relative to ``max(1, |K|)``). Without a ``spec``, separated
    circles are used when ``x1 <= x2`` (no cancellation as t approaches 1) and
    nested origin-centred circles otherwise.
    """
    d = _diagram(d)
    if not (0 <= p1.t < 1 and 0 <= p2.t < 1):
        raise ValueError("heights must lie in [0, 1)")
    if spec is None:
        spec = ContourSpec.separated(d, p1, p2) if p1.x <= p2.x else ContourSpec.for_points(d, p1, p2)
    if spec.nested and (p1.t >= p2.t) != spec.w_inside:
        raise ValueError("contour nesting does not match the sign of t1 - t2")
    if not spec.nested and p1.x > p2.x:
        raise ValueError("separated contours need x1 <= x2")
    m = spec.nodes
    prev = _finite_kernel_nodes(d, p1, p2, spec, m)
    while True:
        m *= 2
        if m > spec.max_nodes:
            raise NumericalError(f"finite kernel did not converge with {spec.max_nodes} nodes")
        cur = _finite_kernel_nodes(d, p1, p2, spec, m)
        if abs(cur - prev) <= spec.tol * max(1.0, abs(cur)):
            break
        prev = cur
    if abs(cur.imag) > spec.tol * max(1.0, abs(cur)):
        raise NumericalError(f"finite kernel has imaginary part {cur.imag:g}")
    return float(cur.real)


def diagonal_mass(d, x: int) -> float:
    """``int_0^1 K((x, t), (x, t)) dt`` by Gauss-Legendre (the density is a polynomial in t)."""
    d = _diagram(d)
    n = max(2, d.size)
    nodes, weights = np.polynomial.legendre.leggauss(n)
    ts = 0.5 * (nodes + 1)
    vals = [finite_kernel(d, SpaceTimePoint(x, t), SpaceTimePoint(x, t)) for t in ts]
    return 0.5 * float(np.dot(weights, vals))


# ---------------------------------------------------------------------------
# infinite bead kernel


@dataclass(frozen=True)
class BeadKernelParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not -1 < self.beta < 1:
            raise ValueError("beta must lie in (-1, 1)")


def _inner_integral(tau, beta, gamma, k, tol):
    # int_{-1}^{1} e^{i tau u} (beta + i u gamma)^k du; real by u -> -u symmetry
    def f(u):
        return (np.exp(1j * tau * u) * (beta + 1j * u * gamma) ** k).real

    val, _ = gk_integrate(f, -1.0, 1.0, abstol=tol, breakpoints=(0.0,))
    return val


def _full_line(tau, beta, gamma, k):
    # int_R e^{i tau u} (beta + i u gamma)^{-k} du for k >= 1, by the residue at u* = i beta / gamma;
    # tau == 0 is taken as the limit from tau > 0
    upper = tau >= 0
    if upper and beta > 0:
        sign = 1.0
    elif not upper and beta < 0:
        sign = -1.0
    else:
        return 0.0
    if tau == 0 and k > 1:
        return 0.0
    res = (1j * gamma) ** (-k) * (1j * tau) ** (k - 1) * math.exp(-tau * beta / gamma) / math.factorial(k - 1)
    return float((sign * 2j * np.pi * res).real)


def bead_kernel(params: BeadKernelParams, p1: SpaceTimePoint, p2: SpaceTimePoint, tol: float = 1e-13) -> float:
    """Kernel ``J_{alpha, beta}`` of the infinite bead process.

    For ``x2 < x1`` the integral over the complement of ``[-1, 1]`` is the full-line
    integral (a single residue) minus the integral over ``[-1, 1]``. At equal
    heights on that branch the value is the limit ``t2 -> t1`` from below.
    """
    a, b = params.alpha, params.beta
    g = math.sqrt(1 - b * b)
    tau = a * (p1.t - p2.t)
    k = p2.x - p1.x
    if k >= 0:
        return a / (2 * np.pi) * _inner_integral(tau, b, g, k, tol)
    full = _full_line(tau, b, g, -k)
    inner = _inner_integral(tau, b, g, k, tol)
    return -a / (2 * np.pi) * (full - inner)


# ---------------------------------------------------------------------------
# local limit kernel


def _liquid(shape, x0, t0):
    c = solve_critical(shape, x0, t0)
    if not c.liquid:
        raise FrozenPointError(f"({x0}, {t0}) is frozen")
    return c


def bead_params(shape, x0: float, t0: float) -> BeadKernelParams:
    c = _liquid(shape, x0, t0)
    return BeadKernelParams(c.alpha, c.beta)


def conjugation_factor(U_c: complex, t0: float, p: SpaceTimePoint) -> float:
    """``g(x, t) = exp(t R cos(theta) / (1 - t0)) * (R / (1 - t0))^(-x)`` with ``U_c = R e^{i theta}``."""
    s = 1.0 - t0
    return math.exp(p.t * U_c.real / s) * (abs(U_c) / s) ** (-p.x)


def _segment(f, a, b, n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    w = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    return 0.5 * (b - a) * np.dot(weights, f(w))


def limit_kernel(shape, x0: float, t0: float, p1: SpaceTimePoint, p2: SpaceTimePoint,
                 method: str = "direct", nodes: int = 64) -> float:
    """Local limit kernel at the liquid point ``(x0, t0)``.

    ``method="direct"`` integrates ``exp(W c) (W / (1 - t0))^(x2 - x1) / (1 - t0)``,
    ``c = (t1 - t2)/(1 - t0)``, from ``conj(U_c)`` to ``U_c`` along a path to the
    right of 0, then corrects by the residue at 0 when the path must pass on the
    left (``t1 >= t2``). ``method="conjugation"`` returns ``g(p1)/g(p2) * J``.
    """
    c = _liquid(shape, x0, t0)
    U = c.U_c
    s = 1.0 - t0
    if method == "conjugation":
        J = bead_kernel(BeadKernelParams(c.alpha, c.beta), p1, p2)
        return conjugation_factor(U, t0, p1) / conjugation_factor(U, t0, p2) * J
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    cc = (p1.t - p2.t) / s
    k = p2.x - p1.x

    def f(W):
        return np.exp(W * cc) * (W / s) ** k / s

    shift = abs(U.real) + 1.0
    lo, hi = U.conjugate(), U
    # polygon conj(U) -> conj(U)+shift -> U+shift -> U stays right of 0
    total = (_segment(f, lo, lo + shift, nodes) + _segment(f, lo + shift, hi + shift, nodes)
             + _segment(f, hi + shift, hi, nodes))
    val = total / (2j * np.pi)
    if k < 0 and p1.t >= p2.t:
        n = -k
        val -= s ** (n - 1) * cc ** (n - 1) / math.factorial(n - 1)
    return float(val.real)
