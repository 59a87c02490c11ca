"""Command line front end: ``tableau-limits <command> [flags]``.

Settings come from built-in defaults, then an optional JSON file given with
``--config``, then explicit flags. Output goes to ``--out``, falling back to
``$TABLEAU_LIMITS_OUT`` and then the current directory.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .diagram import HEART, PIPE, SQUARE, InterlacingDiagram, NormalizedShape, Partition, interlacing_from_partition, load_shape
from .emit import write_csv, write_svg_polyline
from .errors import NumericalError, ShapeError
from .kernels import BeadKernelParams, SpaceTimePoint, bead_kernel, diagonal_mass, finite_kernel
from .limit_surface import (LShapeParams, continuity_criterion, frozen_boundary, lshape_from_pqr, phase_curve_Q,
                            phase_curve_Qpm, rectangle, vertical_profile)
from .sampler import MAX_CELLS, dilated_partition, rescaled_height_profile, sample_beads

OUT_ENV = "TABLEAU_LIMITS_OUT"

DEFAULTS = {
    "surface": {"shape": "heart", "nx": 21, "nt": 21, "ny": 21, "dt": 1e-3, "abstol": 1e-10},
    "boundary": {"shape": "heart", "per_gap": 400},
    "sample": {"shape": "heart", "n": 10, "reps": 1, "seed": 0, "max_cells": MAX_CELLS},
    "compare": {"shape": "heart", "n": "10,20,40", "reps": 20, "seed": 0, "nx": 41, "nt": 41,
                "max_cells": MAX_CELLS},
    "kernel": {"shape": "(2,1)", "nt": 11, "alpha": None, "beta": None},
    "phase": {"r": "1", "points": 201},
}


class ConfigError(ValueError):
    pass


def parse_shape(spec) -> tuple[str, InterlacingDiagram]:
    """Resolve a builtin name, ``rect:r``, ``lshape:p,q,r``, a row list or a JSON path."""
    if isinstance(spec, dict):
        return "json", load_shape(spec)
    s = str(spec).strip()
    builtin = {"heart": HEART, "pipe": PIPE, "square": SQUARE}
    if s in builtin:
        return s, builtin[s]
    if s.startswith("rect:"):
        return s, rectangle(Fraction(s[5:]))
    if s.startswith("lshape:"):
        parts = s[7:].split(",")
        if len(parts) != 3:
            raise ConfigError("lshape needs three rationals p,q,r")
        return s, lshape_from_pqr(LShapeParams(*(Fraction(v) for v in parts)))
    if Path(s).suffix == ".json" or Path(s).is_file():
        if not Path(s).is_file():
            raise ConfigError(f"shape file {s} not found")
        return Path(s).stem, load_shape(Path(s))
    body = s.strip("()[] ")
    try:
        rows = tuple(int(v) for v in body.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"unrecognized shape {spec!r}") from None
    return "(" + ",".join(map(str, rows)) + ")", interlacing_from_partition(Partition(rows))


def _positive(cfg, *keys):
    for k in keys:
        v = cfg.get(k)
        if v is not None and not (isinstance(v, (int, float)) and v > 0):
            raise ConfigError(f"{k} must be positive, got {v!r}")


def _out_dir(cfg) -> Path:
    out = cfg.get("out") or os.environ.get(OUT_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _n_list(v):
    if isinstance(v, (list, tuple)):
        vals = [int(x) for x in v]
    else:
        vals = [int(x) for x in str(v).split(",") if x.strip()]
    if not vals or any(x < 1 for x in vals):
        raise ConfigError(f"n must be positive integers, got {v!r}")
    return vals


# ---------------------------------------------------------------------------
# commands


def cmd_surface(cfg):
    label, diag = parse_shape(cfg["shape"])
    _positive(cfg, "nx", "nt", "ny", "dt", "abstol")
    shape = NormalizedShape(diag)
    out = _out_dir(cfg)
    lo, hi = shape.support
    xs = np.linspace(lo, hi, int(cfg["nx"]))
    ts = np.linspace(0.0, 1.0, int(cfg["nt"]))
    hrows, srows, plateaus = [], [], []
    for x in xs:
        prof = vertical_profile(shape, float(x), float(cfg["abstol"]))
        for t, h in zip(ts, prof.heights(ts)):
            hrows.append((float(x), float(t), float(h)))
        for y in np.linspace(abs(x), shape.omega(x), int(cfg["ny"])):
            sv = prof.surface(min(float(y), 2 * prof.total + abs(x)))
            srows.append((float(x), float(y), sv.t_minus_val, sv.t_plus_val))
        for a, b in prof.plateaus(float(cfg["dt"])):
            plateaus.append((float(x), a, b))
    write_csv(out / "height_grid.csv", ["x", "t", "H"], hrows, label)
    write_csv(out / "surface.csv", ["x", "y", "T_minus", "T_plus"], srows, label)
    res = continuity_criterion(diag)
    lines = [f"shape: {label}", f"a: {diag.a}", f"b: {diag.b}",
             f"continuity condition: {'satisfied' if res.holds else 'violated'}"]
    for i0, (l, r) in enumerate(zip(res.lhs, res.rhs), start=1):
        lines.append(f"i0={i0}: lhs={l} rhs={r} residual={l - r}")
    lines.append(f"plateaus on the x-grid (dt={cfg['dt']}): {len(plateaus)}")
    lines += [f"x={x!r}: t in [{a!r}, {b!r}]" for x, a, b in plateaus]
    (out / "continuity.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines[:4 + len(res.lhs)]))
    return 0


def cmd_boundary(cfg):
    label, diag = parse_shape(cfg["shape"])
    _positive(cfg, "per_gap")
    shape = NormalizedShape(diag)
    from .limit_surface import default_s_grid

    fb = frozen_boundary(shape, default_s_grid(shape, int(cfg["per_gap"])))
    out = _out_dir(cfg)
    write_csv(out / "boundary.csv", ["s", "x", "t", "is_cusp"],
              [(s, x, t, int(c)) for s, x, t, c in fb.rows()], label)
    lo, hi = shape.support
    write_svg_polyline(out / "boundary.svg", [list(zip(fb.x.tolist(), fb.t.tolist()))], box=(lo, hi, 0.0, 1.0),
                       markers=[(float(x), float(t)) for x, t, c in zip(fb.x, fb.t, fb.is_cusp) if c])
    print(f"{len(fb.s)} boundary samples, {fb.dropped} dropped, cusps at s={list(fb.cusps)}")
    return 0


def cmd_sample(cfg):
    label, diag = parse_shape(cfg["shape"])
    _positive(cfg, "n", "reps", "max_cells")
    n, reps = int(cfg["n"]), int(cfg["reps"])
    dilated_partition(diag, n, int(cfg["max_cells"]))
    out = _out_dir(cfg)
    streams = np.random.SeedSequence(int(cfg["seed"])).spawn(reps)
    for k, ss in enumerate(streams):
        b = sample_beads(diag, n, np.random.default_rng(ss), int(cfg["max_cells"]))
        write_csv(out / f"beads_{k:03d}.csv", ["thread", "height"],
                  zip(b.thread.tolist(), b.height.tolist()), label, cfg["seed"])
    print(f"wrote {reps} bead configurations of {n * n * diag.size} beads to {out}")
    return 0


def cmd_compare(cfg):
    label, diag = parse_shape(cfg["shape"])
    _positive(cfg, "reps", "nx", "nt", "max_cells")
    ns = _n_list(cfg["n"])
    for n in ns:
        dilated_partition(diag, n, int(cfg["max_cells"]))
    shape = NormalizedShape(diag)
    lo, hi = shape.support
    xs = np.linspace(lo, hi, int(cfg["nx"]))
    ts = np.linspace(0.0, 1.0, int(cfg["nt"]))
    limit = np.array([vertical_profile(shape, float(x)).heights(ts) for x in xs])
    rows, summary = [], []
    root = np.random.SeedSequence(int(cfg["seed"]))
    for n, ss in zip(ns, root.spawn(len(ns))):
        errs = []
        for rep, child in enumerate(ss.spawn(int(cfg["reps"]))):
            b = sample_beads(diag, n, np.random.default_rng(child), int(cfg["max_cells"]))
            err = float(np.abs(rescaled_height_profile(diag, n, b, xs, ts) - limit).max())
            errs.append(err)
            rows.append((n, rep, err))
        summary.append((n, float(np.median(errs))))
        print(f"n={n}: median sup error {summary[-1][1]:.4f} over {len(errs)} replicates")
    out = _out_dir(cfg)
    write_csv(out / "compare.csv", ["n", "rep", "sup_error"], rows, label, cfg["seed"])
    write_csv(out / "compare_summary.csv", ["n", "median_sup_error"], summary, label, cfg["seed"])
    return 0


def cmd_kernel(cfg):
    label, diag = parse_shape(cfg["shape"])
    _positive(cfg, "nt")
    if diag.size > 500:
        raise ConfigError("finite kernel evaluation is limited to diagrams with at most 500 boxes")
    out = _out_dir(cfg)
    ts = (np.arange(int(cfg["nt"])) + 0.5) / int(cfg["nt"])
    ident, diag_rows = [], []
    for x in range(diag.a[0] + 1, diag.a[-1]):
        omega = sum(abs(x - a) for a in diag.a) - sum(abs(x - b) for b in diag.b)
        count = (omega - abs(x)) // 2
        mass = diagonal_mass(diag, x)
        ident.append((x, mass, count, mass - count))
        for t in ts:
            diag_rows.append((x, float(t), finite_kernel(diag, SpaceTimePoint(x, float(t)), SpaceTimePoint(x, float(t)))))
        print(f"x={x}: integral={mass:.12f} count={count} residual={mass - count:.3e}")
    write_csv(out / "kernel_identity.csv", ["x", "integral", "count", "residual"], ident, label)
    write_csv(out / "kernel_diagonal.csv", ["x", "t", "K"], diag_rows, label)
    if cfg.get("alpha") is not None or cfg.get("beta") is not None:
        if cfg.get("alpha") is None or cfg.get("beta") is None:
            raise ConfigError("bead kernel grid needs both --alpha and --beta")
        try:
            params = BeadKernelParams(float(cfg["alpha"]), float(cfg["beta"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows = []
        for dx in range(-3, 4):
            for dt in np.linspace(-1.0, 1.0, 9):
                rows.append((dx, float(dt), bead_kernel(params, SpaceTimePoint(0, 0.0), SpaceTimePoint(dx, float(dt)))))
        write_csv(out / "bead_kernel.csv", ["dx", "dt", "J"], rows, f"alpha={params.alpha},beta={params.beta}")
    return 0


def cmd_phase(cfg):
    _positive(cfg, "points")
    try:
        r = Fraction(str(cfg["r"]))
    except ValueError:
        raise ConfigError(f"r must be rational, got {cfg['r']!r}") from None
    if r <= 0:
        raise ConfigError("r must be positive")
    rf = float(r)
    ps = np.linspace(-1.0, rf, int(cfg["points"]) + 2)[1:-1]
    rows = []

    def inside(p, q):
        return abs(p) < q <= min(p + 2, 2 * rf - p)

    for p in ps:
        p = float(p)
        cands = []
        if r == 1:
            cands.append(("Q", phase_curve_Q(p) if 2 - p * p >= 0 else None))
        else:
            if p <= 0:
                cands.append(("Q_plus", _safe_qpm(rf, p, 1)))
            if p >= rf - 1:
                cands.append(("Q_minus", _safe_qpm(rf, p, -1)))
        for name, q in cands:
            if q is not None and inside(p, q):
                rows.append((name, p, q))
    if r == 1:
        rows += [("p_zero", 0.0, float(q)) for q in np.linspace(0.0, 2.0, int(cfg["points"]) + 2)[1:-1]]
    out = _out_dir(cfg)
    write_csv(out / "phase.csv", ["branch", "p", "q"], rows, f"lshape r={r}")
    print(f"{len(rows)} continuity-curve points for r={r}")
    return 0


def _safe_qpm(r, p, sign):
    try:
        return phase_curve_Qpm(r, p, sign)
    except ValueError:
        return None


COMMANDS = {
    "surface": cmd_surface,
    "boundary": cmd_boundary,
    "sample": cmd_sample,
    "compare": cmd_compare,
    "kernel": cmd_kernel,
    "phase": cmd_phase,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tableau-limits", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, shape=True):
        p.add_argument("--config", help="JSON file with settings (flags take precedence)")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
        if shape:
            p.add_argument("--shape", help="heart, pipe, square, rect:r, lshape:p,q,r, rows like (2,1), or a JSON file")

    p = sub.add_parser("surface", help="limiting height grid, T-/T+ surface and continuity report")
    common(p)
    p.add_argument("--nx", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--dt", type=float, help="t-step of the plateau scan")
    p.add_argument("--abstol", type=float)

    p = sub.add_parser("boundary", help="frozen boundary polyline (CSV and SVG) and cusps")
    common(p)
    p.add_argument("--per-gap", dest="per_gap", type=int)

    p = sub.add_parser("sample", help="bead configurations of uniform Poissonized tableaux")
    common(p)
    p.add_argument("--n", type=int, help="dilation factor")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-cells", dest="max_cells", type=int)

    p = sub.add_parser("compare", help="sup-norm error of rescaled empirical heights against the limit")
    common(p)
    p.add_argument("--n", help="comma separated dilation factors")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--nx", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--max-cells", dest="max_cells", type=int)

    p = sub.add_parser("kernel", help="finite kernel diagonal and box-count identity; optional bead kernel grid")
    common(p)
    p.add_argument("--nt", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)

    p = sub.add_parser("phase", help="continuity curves in the (p, q) plane of L-shapes")
    common(p, shape=False)
    p.add_argument("--r", help="rational side parameter r")
    p.add_argument("--points", type=int)
    return parser


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg) - {"out"}
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        cfg.update(loaded)
    for k, v in vars(args).items():
        if k not in ("command", "config") and v is not None:
            cfg[k] = v
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ShapeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
