"""Acceptance criteria A1-A11.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion with the measured quantities.
"""
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from tableau_limits.critical import (
    discriminant,
    discriminant_sign,
    burgers_residual,
    degenerate_column,
    localize_real_roots,
    solve_critical,
)
from tableau_limits.diagram import HEART, PIPE, SQUARE, NormalizedShape, Partition, interlacing_from_partition
from tableau_limits.kernels import (
    SpaceTimePoint,
    bead_kernel,
    bead_params,
    conjugation_factor,
    diagonal_mass,
    finite_kernel,
    limit_kernel,
)
from tableau_limits.limit_surface import (
    LShapeParams,
    continuity_criterion,
    height_infinity,
    lshape_from_pqr,
    rational_Q_point,
    rect_height,
    vertical_profile,
)
from tableau_limits.sampler import (
    count_syt,
    hook_walk_batch,
    rescaled_height_profile,
    sample_beads,
    window_extract,
)

HEART_N = NormalizedShape(HEART)
PIPE_N = NormalizedShape(PIPE)
SQUARE_N = NormalizedShape(SQUARE)


@pytest.mark.criterion("A1")
def test_a1_continuity_ledger(criterion):
    heart = continuity_criterion(HEART)
    pipe = continuity_criterion(PIPE)
    criterion(f"heart lhs={heart.lhs[0]} rhs={heart.rhs[0]}; pipe lhs={pipe.lhs[0]} rhs={pipe.rhs[0]}")
    assert heart.holds
    assert heart.lhs == (Fraction(1, 12),) and heart.rhs == (Fraction(1, 12),)
    assert not pipe.holds
    assert pipe.lhs == (Fraction(83, 21230),) and pipe.rhs == (Fraction(-7, 10700),)
    assert pipe.residuals[0] == Fraction(83, 21230) + Fraction(7, 10700) != 0


@pytest.mark.criterion("A2")
def test_a2_square_point(criterion):
    c = solve_critical(SQUARE_N, 0.0, 0.5)
    h = height_infinity(shape=SQUARE_N, x=0.0, t=1.0)
    xs = np.linspace(-1.0, 1.0, 22)[1:-1]
    ts = np.linspace(0.0, 1.0, 20)
    gap = 0.0
    for x in xs:
        hs = vertical_profile(SQUARE_N, float(x)).heights(ts)
        ref = np.array([rect_height(1, float(x), float(t)) for t in ts])
        gap = max(gap, float(np.abs(hs - ref).max()))
    criterion(f"U_c={c.U_c:.12g} alpha={c.alpha:.12g} beta={c.beta:.3g} H(0,1)={h:.12f} "
              f"max|H-H_rect| over 20x20={gap:.2e}")
    assert abs(c.U_c - 1j) < 1e-10
    assert abs(c.alpha - 2) < 1e-10 and abs(c.beta) < 1e-10
    assert abs(h - 1) < 1e-6
    assert gap < 1e-6


@pytest.mark.criterion("A3")
def test_a3_boundary_conditions(criterion):
    worst = {}
    for name, sh in (("heart", HEART_N), ("pipe", PIPE_N)):
        lo, hi = sh.support
        xs = np.linspace(lo, hi, 22)[1:-1]
        err = max(abs(height_infinity(shape=sh, x=float(x), t=1.0) - 0.5 * (sh.omega(float(x)) - abs(x)))
                  for x in xs)
        worst[name] = err
    criterion(f"max error heart={worst['heart']:.2e} pipe={worst['pipe']:.2e}")
    assert max(worst.values()) < 1e-5


@pytest.mark.criterion("A4")
@pytest.mark.slow
def test_a4_liquid_region_consistency(criterion):
    checked = skipped = mismatches = 0
    for sh in (HEART_N, PIPE_N):
        lo, hi = sh.support
        for x in np.linspace(lo, hi, 102)[1:-1]:
            x = float(x)
            if degenerate_column(sh, x) is not None:
                continue
            for t in np.linspace(0.0, 1.0, 102)[1:-1]:
                t = float(t)
                c = solve_critical(sh, x, t)
                localize_real_roots(sh, x, t)
                if abs(discriminant(sh, x, t)) <= 1e-9:
                    skipped += 1
                    continue
                checked += 1
                mismatches += c.liquid != (discriminant_sign(sh, x, t) == -1)
    criterion(f"{checked} points compared, {skipped} with |Disc| <= 1e-9, {mismatches} disagreements")
    assert mismatches == 0


@pytest.mark.criterion("A5")
@pytest.mark.slow
def test_a5_monte_carlo_limit_shape(criterion):
    lo, hi = HEART_N.support
    xs = np.linspace(lo, hi, 41)
    ts = np.linspace(0.0, 1.0, 41)
    limit = np.array([vertical_profile(HEART_N, float(x)).heights(ts) for x in xs])
    medians = {}
    root = np.random.SeedSequence(2024)
    for n, ss in zip((10, 20, 40), root.spawn(3)):
        errs = []
        for child in ss.spawn(20):
            b = sample_beads(HEART, n, np.random.default_rng(child))
            errs.append(np.abs(rescaled_height_profile(HEART, n, b, xs, ts) - limit).max())
        medians[n] = float(np.median(errs))
    criterion("median sup errors " + ", ".join(f"n={n}: {v:.4f}" for n, v in medians.items()))
    assert medians[10] < 0.12 and medians[20] < 0.08 and medians[40] < 0.06
    assert medians[10] > medians[20] > medians[40]


@pytest.mark.criterion("A6")
def test_a6_kernel_identity(criterion):
    worst = 0.0
    for rows in ((1,), (2, 1), (2, 2)):
        d = interlacing_from_partition(rows)
        for x in range(d.a[0] + 1, d.a[-1]):
            omega = sum(abs(x - a) for a in d.a) - sum(abs(x - b) for b in d.b)
            count = (omega - abs(x)) // 2
            worst = max(worst, abs(diagonal_mass(d, x) - count))
    one = interlacing_from_partition((1,))
    pointwise = max(abs(finite_kernel(one, SpaceTimePoint(0, t), SpaceTimePoint(0, t)) - 1.0)
                    for t in np.linspace(0.0, 0.99, 34))
    criterion(f"max |integral - count|={worst:.2e}; lambda=(1) max |K-1|={pointwise:.2e}")
    assert worst < 1e-5
    assert pointwise < 1e-6


def _window_density(x0_threads, t0, n, reps, seed):
    N = n * n * HEART.size
    counts = []
    for child in np.random.SeedSequence(seed).spawn(reps):
        b = sample_beads(HEART, n, np.random.default_rng(child))
        counts.append(len(window_extract(b, x0_threads, t0, N, 5, 5.0)))
    return float(np.mean(counts))


@pytest.mark.criterion("A7")
@pytest.mark.slow
def test_a7_local_density(criterion):
    # x0 = 0 corresponds to thread 0 for every n
    t0 = 0.3
    c = solve_critical(HEART_N, 0.0, t0)
    assert c.liquid
    target = c.alpha / math.pi
    rel = {}
    for n in (8, 32):
        rel[n] = abs(_window_density(0, t0, n, 200, 7) / (11 * 10.0) - target) / target
    assert not solve_critical(HEART_N, 0.0, 0.88).liquid
    frozen_mean = _window_density(0, 0.88, 32, 200, 8)
    criterion(f"alpha/pi={target:.5f}; relative error n=8: {rel[8]:.4f}, n=32: {rel[32]:.4f}; "
              f"frozen mean count={frozen_mean:.4f}")
    assert rel[32] < 0.15
    assert rel[32] < rel[8]
    assert frozen_mean < 0.05


@pytest.mark.criterion("A8")
def test_a8_kernel_conjugation(criterion):
    worst = diag = 0.0
    for x0, t0 in ((0.0, 0.3), (-0.5, 0.4), (0.5, 0.5)):
        c = solve_critical(HEART_N, x0, t0)
        params = bead_params(HEART_N, x0, t0)
        p1 = SpaceTimePoint(0, 0.0)
        for dx in range(-2, 3):
            for dt in (-0.6, -0.3, 0.25, 0.5, 0.9):
                p2 = SpaceTimePoint(dx, dt)
                K = limit_kernel(HEART_N, x0, t0, p1, p2)
                ratio = conjugation_factor(c.U_c, t0, p2) / conjugation_factor(c.U_c, t0, p1)
                worst = max(worst, abs(K * ratio - bead_kernel(params, p1, p2)))
        diag = max(diag, abs(bead_kernel(params, p1, p1) - params.alpha / math.pi))
    criterion(f"max |K g-ratio - J|={worst:.2e}; max |J(p,p) - alpha/pi|={diag:.2e}")
    assert worst < 1e-8
    assert diag < 1e-10


# liquid points at distance at least 0.1 from the frozen boundary
BURGERS_POINTS = [(-1.0, 0.5), (-0.75, 0.35), (-0.75, 0.65), (-0.5, 0.5), (0.0, 0.35),
                  (0.0, 0.5), (0.25, 0.65), (0.5, 0.35), (0.75, 0.8), (1.0, 0.65)]


@pytest.mark.criterion("A9")
def test_a9_burgers_residual(criterion):
    r1 = np.array([abs(burgers_residual(HEART_N, x, t, 1e-3)) for x, t in BURGERS_POINTS])
    r2 = np.array([abs(burgers_residual(HEART_N, x, t, 5e-4)) for x, t in BURGERS_POINTS])
    ratio = r1 / r2
    criterion(f"max residual h=1e-3: {r1.max():.2e}; halving ratios in [{ratio.min():.3f}, {ratio.max():.3f}]")
    assert r1.max() < 1e-4
    assert np.all((ratio > 3.5) & (ratio < 4.5))


def _inside(p, q, r=1):
    return -1 < p < r and abs(p) < q <= min(p + 2, 2 * r - p)


@pytest.mark.criterion("A10")
def test_a10_phase_diagram(criterion):
    us = [Fraction(k, d) for d in (2, 3, 5, 7, 11) for k in range(-3 * d, 3 * d + 1)]
    on_curve = []
    for u in us:
        p, q = rational_Q_point(u)
        if p != 0 and _inside(p, q) and (p, q) not in on_curve:
            on_curve.append((p, q))
    on_curve = on_curve[:10]
    assert len(on_curve) == 10
    rng = np.random.default_rng(11)
    off_curve = []
    while len(off_curve) < 10:
        p, q = on_curve[len(off_curve)]
        q2 = q + Fraction(int(rng.integers(1, 50)), 997) * (1 if rng.random() < 0.5 else -1)
        if _inside(p, q2):
            off_curve.append((p, q2))
    hold_on = [continuity_criterion(lshape_from_pqr(LShapeParams(p, q, 1))).holds for p, q in on_curve]
    hold_off = [continuity_criterion(lshape_from_pqr(LShapeParams(p, q, 1))).holds for p, q in off_curve]
    criterion(f"on-curve satisfied {sum(hold_on)}/10; off-curve satisfied {sum(hold_off)}/10")
    assert all(hold_on)
    assert not any(hold_off)


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


ALL_SMALL = [p for n in range(1, 7) for p in _partitions(n)]


@pytest.mark.criterion("A11")
@pytest.mark.slow
def test_a11_hook_walk_exactness(criterion):
    rng = np.random.default_rng(99)
    worst_p, single = 1.0, 0
    for rows in ALL_SMALL:
        samples = hook_walk_batch(Partition(rows), 100_000, rng)
        counts = Counter(s.tobytes() for s in samples)
        total = count_syt(rows)
        assert len(counts) <= total
        if total == 1:
            single += 1
            assert len(counts) == 1
            continue
        obs = np.array(list(counts.values()) + [0] * (total - len(counts)))
        p = chisquare(obs).pvalue
        worst_p = min(worst_p, p)
    criterion(f"{len(ALL_SMALL)} shapes, {single} with a single tableau; min chi-square p={worst_p:.4f}")
    assert len(ALL_SMALL) == 29
    assert worst_p > 1e-3
