"""Young diagrams in interlacing (Kerov) coordinates.

A diagram is stored through the local minima ``a_0 < ... < a_m`` and local
maxima ``b_1 < ... < b_m`` of its profile drawn in Russian convention. Every
analytic routine in the package consumes this representation; partitions are
only an input/output convenience.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError

__all__ = [
    "Partition",
    "InterlacingDiagram",
    "NormalizedShape",
    "interlacing_from_partition",
    "partition_from_interlacing",
    "size",
    "dilate",
    "profile_omega",
    "in_domain",
    "from_rational",
    "load_shape",
    "HEART",
    "PIPE",
    "SQUARE",
]


@dataclass(frozen=True)
class Partition:
    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if not rows:
            raise ShapeError("partition must have at least one row")
        if any(r < 1 for r in rows):
            raise ShapeError(f"rows must be positive integers, got {rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ShapeError(f"rows must be non-increasing, got {rows}")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    @property
    def length(self) -> int:
        return len(self.rows)

    def columns(self) -> tuple[int, ...]:
        """Conjugate partition (column lengths)."""
        return tuple(sum(1 for r in self.rows if r > j) for j in range(self.rows[0]))

    def cells(self):
        """Yield ``(i, j)`` (0-based row, column) for every cell, row by row."""
        for i, r in enumerate(self.rows):
            for j in range(r):
                yield i, j


@dataclass(frozen=True)
class InterlacingDiagram:
    """Interlacing coordinates ``a`` (m+1 minima) and ``b`` (m maxima)."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(_as_int(v, "a") for v in self.a)
        b = tuple(_as_int(v, "b") for v in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        _check_interlacing(a, b)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def size(self) -> int:
        return size(self)

    def merged(self) -> list[int]:
        """Coordinates in profile order ``a_0, b_1, a_1, ..., b_m, a_m``."""
        out = [self.a[0]]
        for bi, ai in zip(self.b, self.a[1:]):
            out += [bi, ai]
        return out


def _as_int(v, name) -> int:
    if isinstance(v, bool):
        raise ShapeError(f"{name}: boolean is not a coordinate")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise ShapeError(f"{name}: coordinate {v!r} is not an integer (use from_rational)")


def _check_interlacing(a: Sequence, b: Sequence) -> None:
    if len(b) < 1 or len(a) != len(b) + 1:
        raise ShapeError(f"need m+1 minima and m >= 1 maxima, got len(a)={len(a)}, len(b)={len(b)}")
    seq = [a[0]]
    for bi, ai in zip(b, a[1:]):
        seq += [bi, ai]
    for u, v in zip(seq, seq[1:]):
        if not u < v:
            raise ShapeError(f"interlacing violated: a_0 < b_1 < a_1 < ... fails at {u} !< {v}")
    if sum(a) != sum(b):
        raise ShapeError(f"sum invariant violated: sum(a)={sum(a)} != sum(b)={sum(b)}")


def interlacing_from_partition(p: Partition | Sequence[int]) -> InterlacingDiagram:
    """Contents of addable corners (``a``) and removable corners (``b``)."""
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    rows = p.rows
    ell = len(rows)
    a, b = [], []
    for i, r in enumerate(rows):
        if i == 0 or rows[i - 1] > r:
            a.append(r - i)
        if i == ell - 1 or rows[i + 1] < r:
            b.append(r - 1 - i)
    a.append(-ell)
    return InterlacingDiagram(tuple(sorted(a)), tuple(sorted(b)))


def partition_from_interlacing(d: InterlacingDiagram) -> Partition:
    # Walk the profile left to right: rising runs are steps along a row,
    # falling runs close off rows of the current length.
    if not isinstance(d, InterlacingDiagram):
        raise ShapeError("expected an InterlacingDiagram")
    bottom_up = []
    col = 0
    for k in range(1, d.m + 1):
        col += d.b[k - 1] - d.a[k - 1]
        bottom_up += [col] * (d.a[k] - d.b[k - 1])
    return Partition(tuple(reversed(bottom_up)))


def size(d: InterlacingDiagram) -> int:
    """Number of boxes, ``(sum a_i^2 - sum b_i^2) / 2``."""
    twice = sum(v * v for v in d.a) - sum(v * v for v in d.b)
    return twice // 2


def dilate(d: InterlacingDiagram, n: int) -> InterlacingDiagram:
    """Replace every box by an ``n x n`` block."""
    if int(n) != n or n < 1:
        raise ShapeError(f"dilation factor must be a positive integer, got {n!r}")
    n = int(n)
    return InterlacingDiagram(tuple(n * v for v in d.a), tuple(n * v for v in d.b))


def from_rational(a: Iterable, b: Iterable, collapse: bool = False) -> tuple[InterlacingDiagram, int]:
    """Build a diagram from rational coordinates by clearing denominators.

    Returns the integer diagram and the multiplier that was applied. With
    ``collapse=True`` coincident neighbours ``b_i == a_{i-1}`` or
    ``b_i == a_i`` are removed in pairs (a degenerate corner), which is how
    boundary points of the L-shape parameter region reduce to rectangles.
    """
    fa = [Fraction(v) for v in a]
    fb = [Fraction(v) for v in b]
    if collapse:
        fa, fb = _collapse(fa, fb)
    mult = math.lcm(*(v.denominator for v in fa + fb))
    ia = tuple(int(v * mult) for v in fa)
    ib = tuple(int(v * mult) for v in fb)
    return InterlacingDiagram(ia, ib), mult


def _collapse(a: list, b: list) -> tuple[list, list]:
    seq = [a[0]]
    for bi, ai in zip(b, a[1:]):
        seq += [bi, ai]
    changed = True
    while changed and len(seq) > 3:
        changed = False
        for k in range(len(seq) - 1):
            if seq[k] == seq[k + 1]:
                del seq[k:k + 2]
                changed = True
                break
    return seq[0::2], seq[1::2]


@dataclass(frozen=True)
class NormalizedShape:
    """A base diagram rescaled by ``eta = 1/sqrt(|lambda|)`` to total area 2."""

    base: InterlacingDiagram
    eta: float = field(init=False)
    xa: np.ndarray = field(init=False, repr=False, compare=False)
    xb: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        eta = 1.0 / math.sqrt(self.base.size)
        object.__setattr__(self, "eta", eta)
        xa = np.array(self.base.a, dtype=float) * eta
        xb = np.array(self.base.b, dtype=float) * eta
        xa.setflags(write=False)
        xb.setflags(write=False)
        object.__setattr__(self, "xa", xa)
        object.__setattr__(self, "xb", xb)

    @classmethod
    def of(cls, shape) -> "NormalizedShape":
        """Coerce a diagram, partition or row list into a normalized shape."""
        if isinstance(shape, NormalizedShape):
            return shape
        if isinstance(shape, InterlacingDiagram):
            return cls(shape)
        return cls(interlacing_from_partition(shape))

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def support(self) -> tuple[float, float]:
        return float(self.xa[0]), float(self.xa[-1])

    def omega(self, x):
        return profile_omega(self, x)


def profile_omega(shape: NormalizedShape, x):
    """Profile ``omega(x) = sum |x - eta a_i| - sum |x - eta b_i|``.

    Equals ``|x|`` outside the support; vectorized over ``x``.
    """
    shape = NormalizedShape.of(shape)
    xs = np.asarray(x, dtype=float)
    val = np.abs(xs[..., None] - shape.xa).sum(-1) - np.abs(xs[..., None] - shape.xb).sum(-1)
    return float(val) if np.ndim(val) == 0 else val


def in_domain(shape: NormalizedShape, x: float, y: float) -> bool:
    """Strict membership ``|x| < y < omega(x)``."""
    return bool(abs(x) < y < profile_omega(shape, x))


def load_shape(source) -> InterlacingDiagram:
    """Load ``{"rows": [...]}`` or ``{"a": [...], "b": [...]}`` from a dict, JSON text or path.

    Rational entries (strings like ``"3/2"``) are accepted in the ``a``/``b``
    form and cleared to integers.
    """
    if isinstance(source, (str, Path)) and Path(source).exists():
        obj = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        obj = json.loads(source)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ShapeError("shape JSON must be an object with 'rows' or 'a'/'b'")
    if "rows" in obj:
        return interlacing_from_partition(Partition(tuple(obj["rows"])))
    if "a" in obj and "b" in obj:
        diag, _ = from_rational(obj["a"], obj["b"])
        return diag
    raise ShapeError("shape JSON needs either 'rows' or both 'a' and 'b'")


HEART = InterlacingDiagram((-5, -1, 5), (-4, 3))
PIPE = InterlacingDiagram((-200, -90, 103), (-197, 10))
SQUARE = InterlacingDiagram((-1, 1), (0,))
