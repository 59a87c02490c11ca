"""Text outputs: CSV tables with a provenance line and bare SVG polylines."""
from __future__ import annotations

import csv
from pathlib import Path

from . import __version__


def provenance(shape: str, seed) -> str:
    return f"# shape={shape}, seed={seed}, version={__version__}"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows, shape: str, seed=None) -> Path:
    """Write a provenance comment, a header row and the data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(provenance(shape, seed) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """Rows of a CSV written by :func:`write_csv` as ``(header, list of string lists)``."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def write_svg_polyline(path, polylines, width: int = 600, height: int = 400, margin: int = 20,
                       box=None, markers=()) -> Path:
    """Draw polylines of ``(x, y)`` points; y grows upwards. ``box`` is ``(xmin, xmax, ymin, ymax)``."""
    pts = [p for line in polylines for p in line] + list(markers)
    if box is None:
        xs = [p[0] for p in pts] or [0.0, 1.0]
        ys = [p[1] for p in pts] or [0.0, 1.0]
        box = (min(xs), max(xs), min(ys), max(ys))
    x0, x1, y0, y1 = box
    sx = (width - 2 * margin) / ((x1 - x0) or 1.0)
    sy = (height - 2 * margin) / ((y1 - y0) or 1.0)

    def tr(p):
        return f"{margin + (p[0] - x0) * sx:.3f},{height - margin - (p[1] - y0) * sy:.3f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    parts.append(f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" height="{height - 2 * margin}" '
                 'fill="none" stroke="#999"/>')
    for line in polylines:
        if len(line) > 1:
            parts.append(f'<polyline fill="none" stroke="black" stroke-width="1" points="{" ".join(tr(p) for p in line)}"/>')
    for p in markers:
        x, y = tr(p).split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="red"/>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
    return path
