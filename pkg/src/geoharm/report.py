"""CSV, JSON and SVG writers. Output is deterministic for identical input."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

FUZZ_HEADER = ("inequality", "seed", "map_index", "z_re", "z_im", "w_re", "w_im", "lhs", "rhs", "margin", "rel_margin")
PATH_HEADER = ("s", "x", "y", "vx", "vy", "metric_speed")
SWEEP_HEADER = ("i", "j", "z_re", "z_im", "lhs", "rhs", "margin", "rel_margin", "status")
CHECK_HEADER = ("check", "subject", "value", "tolerance", "passed")

VIOLATION_COLOR = "#ff00ff"
SKIPPED_COLOR = "#d9d9d9"
# viridis anchors, low to high
_RAMP = ["#440154", "#3b528b", "#21918c", "#5ec962", "#fde725"]


def fmt(x) -> str:
    """17 significant digits for floats, plain text otherwise; None is empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(csv_text(header, rows), encoding="utf-8")


def _clean(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json_text(obj), encoding="utf-8")


def fuzz_rows(rows) -> List[tuple]:
    out = []
    for r in rows:
        w = r.w
        out.append(
            (
                r.inequality,
                r.seed,
                r.map_index,
                r.z.real,
                r.z.imag,
                None if w is None else w.real,
                None if w is None else w.imag,
                r.lhs,
                r.rhs,
                r.margin,
                r.rel_margin,
            )
        )
    return out


def _hex(c: str):
    return tuple(int(c[i : i + 2], 16) for i in (1, 3, 5))


def ramp_color(u: float) -> str:
    """Linear interpolation through the ramp anchors for ``u`` in [0, 1]."""
    u = min(1.0, max(0.0, u))
    pos = u * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    t = pos - i
    a, b = _hex(_RAMP[i]), _hex(_RAMP[i + 1])
    rgb = [round(a[k] + (b[k] - a[k]) * t) for k in range(3)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_svg(
    n: int,
    cells: Sequence[tuple],
    title: str,
    tol: float,
    size: int = 600,
) -> str:
    """Self-contained SVG with one rect per grid cell.

    ``cells`` holds ``(i, j, margin or None)``; ``i`` indexes x, ``j`` indexes
    y (row 0 drawn at the top, i.e. largest y).
    """
    margins = [m for _, _, m in cells if m is not None and m >= -tol]
    lo = min(margins) if margins else 0.0
    hi = max(margins) if margins else 1.0
    span = hi - lo if hi > lo else 1.0
    cell = size / n
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 40}" '
        f'viewBox="0 0 {size} {size + 40}">',
        f"<title>{_esc(title)}</title>",
        f'<g shape-rendering="crispEdges">',
    ]
    for i, j, m in cells:
        if m is None:
            color = SKIPPED_COLOR
        elif m < -tol:
            color = VIOLATION_COLOR
        else:
            color = ramp_color((m - lo) / span)
        x = i * cell
        y = (n - 1 - j) * cell
        out.append(
            f'<rect x="{x:.3f}" y="{y:.3f}" width="{cell:.3f}" height="{cell:.3f}" style="fill:{color};stroke:none"/>'
        )
    out.append("</g>")
    out.append(
        f'<text x="4" y="{size + 16}" style="font:12px sans-serif;fill:#000">'
        f"{_esc(title)}: margin {format(lo, '.6g')} .. {format(hi, '.6g')}"
        f"; violations in magenta, skipped in grey</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_text(path: Path, text: str, mode: Optional[str] = None) -> None:
    Path(path).write_text(text, encoding="utf-8")
