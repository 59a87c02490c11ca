"""Uniform random Young tableaux, their bead configurations and empirical heights.

Uniform standard tableaux come from the hook walk of Greene, Nijenhuis and
Wilf (compiled with numba). A Poissonized tableau is obtained by replacing
entry k with the k-th smallest of n iid uniforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .diagram import InterlacingDiagram, Partition, dilate, interlacing_from_partition, partition_from_interlacing
from .errors import NumericalError, ShapeError

MAX_CELLS = 1_000_000


@numba.njit(cache=True)
def _seed(seed):
    np.random.seed(seed)


@numba.njit(cache=True)
def _hook_walk(rows, out):
    ell = rows.shape[0]
    width = rows[0]
    row = rows.copy()
    col = np.zeros(width, np.int64)
    for i in range(ell):
        for j in range(rows[i]):
            col[j] += 1
    n = 0
    for i in range(ell):
        n += rows[i]
    cur_ell = ell
    for k in range(n, 0, -1):
        # uniform cell of the current shape by rejection from its bounding box
        while True:
            i = np.random.randint(0, cur_ell)
            j = np.random.randint(0, row[0])
            if j < row[i]:
                break
        while True:
            arm = row[i] - j - 1
            leg = col[j] - i - 1
            if arm + leg == 0:
                break
            r = np.random.randint(0, arm + leg)
            if r < arm:
                j += 1 + r
            else:
                i += 1 + r - arm
        out[i, j] = k
        row[i] -= 1
        col[j] -= 1
        while cur_ell > 0 and row[cur_ell - 1] == 0:
            cur_ell -= 1


@numba.njit(cache=True)
def _hook_walk_batch(rows, out):
    for s in range(out.shape[0]):
        _hook_walk(rows, out[s])


def _child_seed(rng) -> int:
    return int(rng.integers(2**63))


def _rows_array(p) -> np.ndarray:
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    return np.asarray(p.rows, dtype=np.int64)


@dataclass(frozen=True)
class StandardTableau:
    shape: Partition
    entries: np.ndarray  # (rows, cols), 0 outside the diagram

    def entry(self, i: int, j: int) -> int:
        return int(self.entries[i, j])

    def validate(self) -> None:
        mask = _mask(self.shape)
        vals = np.sort(self.entries[mask])
        if not np.array_equal(vals, np.arange(1, self.shape.size + 1)):
            raise NumericalError("entries are not a bijection onto 1..n")
        _check_monotone(self.entries, mask)


@dataclass(frozen=True)
class PoissonizedTableau:
    shape: Partition
    values: np.ndarray  # (rows, cols), NaN outside the diagram

    def value(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def validate(self) -> None:
        mask = _mask(self.shape)
        v = self.values[mask]
        if np.unique(v).size != v.size or v.min() < 0 or v.max() > 1:
            raise NumericalError("values must be distinct and lie in [0, 1]")
        _check_monotone(self.values, mask)


def _mask(p: Partition) -> np.ndarray:
    rows = np.asarray(p.rows)
    return np.arange(p.rows[0])[None, :] < rows[:, None]


def _check_monotone(arr, mask):
    a = np.where(mask, arr, np.inf).astype(float)
    rows_ok = (a[:, 1:] > a[:, :-1]) | ~mask[:, 1:]
    cols_ok = (a[1:, :] > a[:-1, :]) | ~mask[1:, :]
    if not (rows_ok.all() and cols_ok.all()):
        raise NumericalError("tableau is not increasing along rows and columns")


def hook_walk_sample(p, rng) -> StandardTableau:
    """Exact uniform standard Young tableau of shape ``p``."""
    rows = _rows_array(p)
    out = np.zeros((rows.size, rows[0]), np.int64)
    _seed(_child_seed(rng))
    _hook_walk(rows, out)
    return StandardTableau(Partition(tuple(rows)), out)


def hook_walk_batch(p, n_samples: int, rng) -> np.ndarray:
    """``n_samples`` uniform tableaux as an int array ``(n_samples, rows, cols)``."""
    rows = _rows_array(p)
    out = np.zeros((n_samples, rows.size, rows[0]), np.int64)
    _seed(_child_seed(rng))
    _hook_walk_batch(rows, out)
    return out


def count_syt(p) -> int:
    """Number of standard tableaux of shape ``p`` by the hook length formula."""
    p = p if isinstance(p, Partition) else Partition(tuple(p))
    cols = p.columns()
    hooks = 1
    for i, r in enumerate(p.rows):
        for j in range(r):
            hooks *= (r - j - 1) + (cols[j] - i - 1) + 1
    return math.factorial(p.size) // hooks


def poissonize(t: StandardTableau, rng) -> PoissonizedTableau:
    """Replace entry k by the k-th order statistic of n iid uniforms."""
    n = t.shape.size
    u = np.sort(rng.random(n))
    mask = _mask(t.shape)
    vals = np.full(t.entries.shape, np.nan)
    vals[mask] = u[t.entries[mask] - 1]
    return PoissonizedTableau(t.shape, vals)


@dataclass(frozen=True)
class BeadConfiguration:
    """Beads ``(thread, height)`` sorted by thread then height.

    ``a0`` and ``am`` are the outer minima of the diagram; beads live on the
    threads strictly between them.
    """

    thread: np.ndarray
    height: np.ndarray
    a0: int
    am: int

    def __post_init__(self):
        th = np.asarray(self.thread, dtype=np.int64)
        h = np.asarray(self.height, dtype=float)
        order = np.lexsort((h, th))
        object.__setattr__(self, "thread", th[order])
        object.__setattr__(self, "height", h[order])

    def __len__(self):
        return self.thread.size

    def on_thread(self, x: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.thread, [x, x + 1])
        return self.height[lo:hi]

    def occupancy(self) -> dict[int, int]:
        ths, counts = np.unique(self.thread, return_counts=True)
        return {int(a): int(c) for a, c in zip(ths, counts)}

    def check_interlacing(self) -> None:
        if len(self) and (self.thread.min() <= self.a0 or self.thread.max() >= self.am):
            raise NumericalError("bead outside the open thread range (a_0, a_m)")
        for x in range(self.a0 + 1, self.am):
            h = self.on_thread(x)
            if h.size < 2:
                continue
            for nb in (x - 1, x + 1):
                if nb <= self.a0 or nb >= self.am:
                    continue
                g = self.on_thread(nb)
                between = np.searchsorted(g, h[1:]) - np.searchsorted(g, h[:-1])
                if np.any(between != 1):
                    raise NumericalError(f"interlacing fails between threads {x} and {nb}")

    def grid(self) -> "HeightGrid":
        return HeightGrid(self)


@dataclass(frozen=True)
class HeightGrid:
    beads: BeadConfiguration

    def count(self, thread, t):
        return empirical_height(self.beads, thread, t)


def beads_from_tableau(t: PoissonizedTableau, check: bool = True) -> BeadConfiguration:
    """One bead per cell at ``(content j - i, value)``."""
    mask = _mask(t.shape)
    ii, jj = np.nonzero(mask)
    d = interlacing_from_partition(t.shape)
    b = BeadConfiguration(jj - ii, t.values[ii, jj], d.a[0], d.a[-1])
    if check:
        b.check_interlacing()
    return b


def empirical_height(b: BeadConfiguration, x, t):
    """Number of beads on thread ``x`` at height at most ``t`` (vectorized in both)."""
    x = np.asarray(x, dtype=np.int64)
    t = np.asarray(t, dtype=float)
    lo = np.searchsorted(b.thread, x, side="left")
    hi = np.searchsorted(b.thread, x, side="right")
    # heights are sorted inside each thread block
    out = np.zeros(np.broadcast(x, t).shape, np.int64)
    for idx in np.ndindex(out.shape):
        xl = lo[idx if lo.ndim else ()]
        xh = hi[idx if hi.ndim else ()]
        tv = t[idx if t.ndim else ()]
        out[idx] = np.searchsorted(b.height[xl:xh], tv, side="right")
    return int(out) if out.ndim == 0 else out


def dilated_partition(shape0, n: int, max_cells: int = MAX_CELLS) -> Partition:
    """Partition of the n-fold dilation, refusing shapes above ``max_cells`` boxes."""
    d = shape0 if isinstance(shape0, InterlacingDiagram) else interlacing_from_partition(shape0)
    cells = n * n * d.size
    if cells > max_cells:
        raise ShapeError(f"dilated shape has {cells} cells, above the limit of {max_cells}")
    return partition_from_interlacing(dilate(d, n))


def sample_beads(shape0, n: int, rng, max_cells: int = MAX_CELLS) -> BeadConfiguration:
    """Bead configuration of a uniform Poissonized tableau of the n-fold dilation."""
    p = dilated_partition(shape0, n, max_cells)
    return beads_from_tableau(poissonize(hook_walk_sample(p, rng), rng), check=False)


def _thread_heights(b: BeadConfiguration, threads):
    ths = np.unique(threads)
    return {int(x): b.on_thread(int(x)) for x in ths}


def rescaled_height_profile(shape0, n: int, sample: BeadConfiguration, x_grid, t_grid) -> np.ndarray:
    """``H(floor(x sqrt N), t) / sqrt N`` on the product grid, shape ``(len(x_grid), len(t_grid))``."""
    d = shape0 if isinstance(shape0, InterlacingDiagram) else interlacing_from_partition(shape0)
    N = n * n * d.size
    rN = math.sqrt(N)
    eta = 1.0 / math.sqrt(d.size)
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(x_grid < eta * d.a[0] - 1e-12) or np.any(x_grid > eta * d.a[-1] + 1e-12):
        raise ValueError("x_grid leaves the support of the normalized shape")
    threads = np.floor(x_grid * rN + 1e-9).astype(np.int64)
    heights = _thread_heights(sample, threads)
    out = np.empty((x_grid.size, t_grid.size))
    for i, th in enumerate(threads):
        out[i] = np.searchsorted(heights[int(th)], t_grid, side="right")
    return out / rN


@dataclass(frozen=True)
class BeadWindow:
    """Beads of a window in local coordinates ``(thread - x0, (height - t0) sqrt N)``."""

    x: np.ndarray
    t: np.ndarray
    half_width: int
    half_height: float

    def __len__(self):
        return self.x.size


def window_extract(b: BeadConfiguration, x0_threads: int, t0: float, N: int,
                   half_width: int, half_height: float) -> BeadWindow:
    """Beads with ``|thread - x0| <= half_width`` and ``|height - t0| sqrt N <= half_height``."""
    if int(x0_threads) != x0_threads:
        raise ValueError("x0_threads must be an integer thread index")
    rN = math.sqrt(N)
    if x0_threads - half_width <= b.a0 or x0_threads + half_width >= b.am:
        raise ValueError("window leaves the thread range of the diagram")
    if t0 - half_height / rN < 0 or t0 + half_height / rN > 1:
        raise ValueError("window leaves the height range [0, 1]")
    sel = (np.abs(b.thread - x0_threads) <= half_width) & (np.abs(b.height - t0) * rN <= half_height)
    return BeadWindow(b.thread[sel] - int(x0_threads), (b.height[sel] - t0) * rN, int(half_width), float(half_height))
