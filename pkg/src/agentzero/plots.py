"""Static SVG line charts and heatmaps rendered from run CSVs.

Plain string assembly, no plotting dependency. All coordinates are printed
with fixed precision so identical inputs give byte-identical documents.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
WIDTH, HEIGHT = 800, 420
MARGIN = dict(left=70, right=150, top=40, bottom=50)


class CSVFormatError(ValueError):
    pass


@dataclass
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]


def read_table(path: str | Path, numeric: Sequence[str] = ()) -> dict[str, list]:
    """Read a CSV into columns; ``numeric`` columns are parsed as floats.

    Raises ``CSVFormatError`` naming the file and line on any malformed row,
    and on a header-only file.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVFormatError(f"{path}:1: empty file") from None
        cols: dict[str, list] = {h: [] for h in header}
        missing = [c for c in numeric if c not in cols]
        if missing:
            raise CSVFormatError(f"{path}:1: missing columns {missing}")
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise CSVFormatError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            for h, v in zip(header, row):
                if h in numeric:
                    if v == "":
                        cols[h].append(math.nan)
                        continue
                    try:
                        cols[h].append(float(v))
                    except ValueError:
                        raise CSVFormatError(f"{path}:{line}: column {h!r} is not numeric: {v!r}") from None
                else:
                    cols[h].append(v)
    if not cols[header[0]]:
        raise CSVFormatError(f"{path}:2: no data rows")
    return cols


def _nice_range(lo: float, hi: float) -> tuple[float, float]:
    if not math.isfinite(lo) or not math.isfinite(hi):
        return 0.0, 1.0
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]


def _axes(parts: list[str], xr, yr, xlabel: str, ylabel: str, sx, sy) -> None:
    l, t = MARGIN["left"], MARGIN["top"]
    r, b = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    parts.append(f'<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>')
    parts.append(f'<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>')
    for v in _ticks(*xr):
        x = sx(v)
        parts.append(f'<line x1="{x:.2f}" y1="{b}" x2="{x:.2f}" y2="{b + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{b + 18}" text-anchor="middle">{v:.4g}</text>')
    for v in _ticks(*yr):
        y = sy(v)
        parts.append(f'<line x1="{l - 5}" y1="{y:.2f}" x2="{l}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{l - 8}" y="{y + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    parts.append(
        f'<text x="{(l + r) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" class="xlabel">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(t + b) / 2:.1f}" text-anchor="middle" class="ylabel" '
        f'transform="rotate(-90 18 {(t + b) / 2:.1f})">{escape(ylabel)}</text>'
    )


def line_chart(series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> str:
    if not series:
        raise ValueError("line chart needs at least one series")
    xs_all = [x for s in series for x in s.xs]
    ys_all = [y for s in series for y in s.ys if math.isfinite(y)]
    xr = _nice_range(min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    yr = _nice_range(min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    l, t = MARGIN["left"], MARGIN["top"]
    r, b = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]

    def sx(v: float) -> float:
        return l + (v - xr[0]) / (xr[1] - xr[0]) * (r - l)

    def sy(v: float) -> float:
        return b - (v - yr[0]) / (yr[1] - yr[0]) * (b - t)

    parts = _svg_open(title)
    _axes(parts, xr, yr, xlabel, ylabel, sx, sy)
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(s.xs, s.ys) if math.isfinite(y))
        parts.append(
            f'<polyline class="series" data-label="{escape(s.label)}" fill="none" '
            f'stroke="{color}" stroke-width="1.2" points="{pts}"/>'
        )
        ly = t + 16 * k + 8
        parts.append(f'<line x1="{r + 12}" y1="{ly}" x2="{r + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{r + 38}" y="{ly + 4}">{escape(s.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heat_color(v: float, lo: float, hi: float) -> str:
    # diverging blue-white-red centered on zero
    if v > 0:
        f = min(1.0, v / hi) if hi > 0 else 1.0
        return f"rgb(255,{round(255 * (1 - f))},{round(255 * (1 - f))})"
    f = min(1.0, v / lo) if lo < 0 else 0.0
    return f"rgb({round(255 * (1 - f))},{round(255 * (1 - f))},255)"


def heatmap(
    matrix: np.ndarray,
    row_axis: Sequence[float],
    col_axis: Sequence[float],
    title: str,
    row_label: str,
    col_label: str,
    boundary: tuple[float, float] | None = None,
) -> str:
    """Heatmap of ``matrix[row, col]``; rows run along x, columns along y.

    ``boundary=(intercept, slope)`` overlays the line col = intercept + slope*row.
    """
    m = np.asarray(matrix, dtype=float)
    nr, nc = m.shape
    l, t = MARGIN["left"], MARGIN["top"]
    r, b = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    xr = (float(row_axis[0]), float(row_axis[-1]))
    yr = (float(col_axis[0]), float(col_axis[-1]))
    cw, ch = (r - l) / nr, (b - t) / nc

    def sx(v: float) -> float:
        return l + (v - xr[0]) / (xr[1] - xr[0]) * (r - l - cw) + cw / 2

    def sy(v: float) -> float:
        return b - (v - yr[0]) / (yr[1] - yr[0]) * (b - t - ch) - ch / 2

    lo, hi = float(m.min()), float(m.max())
    parts = _svg_open(title)
    for i in range(nr):
        for j in range(nc):
            parts.append(
                f'<rect x="{l + i * cw:.2f}" y="{b - (j + 1) * ch:.2f}" width="{cw:.2f}" '
                f'height="{ch:.2f}" fill="{_heat_color(m[i, j], lo, hi)}"/>'
            )
    _axes(parts, xr, yr, row_label, col_label, sx, sy)
    if boundary is not None:
        c0, slope = boundary
        x0, x1 = xr
        parts.append(
            f'<line class="boundary" x1="{sx(x0):.2f}" y1="{sy(c0 + slope * x0):.2f}" '
            f'x2="{sx(x1):.2f}" y2="{sy(c0 + slope * x1):.2f}" stroke="black" '
            f'stroke-dasharray="4 3" stroke-width="1.5"/>'
        )
    parts.append(f'<text x="{r + 12}" y="{t + 12}">D &gt; 0 red</text>')
    parts.append(f'<text x="{r + 12}" y="{t + 28}">D &lt;= 0 blue</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- run-directory rendering ----------------------------------------------

AGENT_PLOTS = ("disposition", "affect", "probability", "contagion", "radius", "damage")


def _agent_series(cols: dict[str, list], column: str) -> list[Series]:
    by_agent: dict[int, tuple[list, list]] = {}
    for tick, aid, v in zip(cols["tick"], cols["agent_id"], cols[column]):
        xs, ys = by_agent.setdefault(int(aid), ([], []))
        xs.append(tick)
        ys.append(v)
    return [Series(f"agent {a}", xs, ys) for a, (xs, ys) in sorted(by_agent.items())]


def render_surface(surface_csv: str | Path, out_path: str | Path, theta: float, p_fixed: float) -> Path:
    cols = read_table(surface_csv, numeric=("affect", "contagion", "disposition"))
    affects = sorted(set(cols["affect"]))
    contagions = sorted(set(cols["contagion"]))
    if len(affects) * len(contagions) != len(cols["disposition"]):
        raise CSVFormatError(f"{surface_csv}: surface is not a full grid")
    m = np.asarray(cols["disposition"]).reshape(len(affects), len(contagions))
    svg = heatmap(
        m, affects, contagions,
        "Disposition over affect and contagion", "affect", "contagion",
        boundary=(theta - p_fixed, -1.0),
    )
    out = Path(out_path)
    out.write_text(svg, encoding="utf-8", newline="\n")
    return out


def render_plots(run_dir: str | Path) -> list[Path]:
    """Render every standard plot for a run directory; return written paths.

    All inputs are parsed before anything is written, so a malformed CSV
    leaves no partial output behind.
    """
    run_dir = Path(run_dir)
    agents = read_table(run_dir / "agents.csv", numeric=("tick", "agent_id") + AGENT_PLOTS)
    glob = read_table(
        run_dir / "global.csv",
        numeric=("tick", "destroyed_count", "active_count", "avg_tie_strength",
                 "tie_strength_dispersion", "mean_contagion"),
    )
    docs: dict[str, str] = {}
    for column in AGENT_PLOTS:
        docs[f"{column}.svg"] = line_chart(
            _agent_series(agents, column), f"{column} over time", "tick", column
        )
    docs["patches.svg"] = line_chart(
        [Series(c, glob["tick"], glob[c]) for c in ("destroyed_count", "active_count")],
        "patch states over time", "tick", "patches",
    )
    docs["network.svg"] = line_chart(
        [Series(c, glob["tick"], glob[c])
         for c in ("avg_tie_strength", "tie_strength_dispersion", "mean_contagion")],
        "tie strength and contagion over time", "tick", "value",
    )
    surface_csv = run_dir / "surface.csv"
    written = []
    for name, doc in docs.items():
        path = run_dir / name
        path.write_text(doc, encoding="utf-8", newline="\n")
        written.append(path)
    if surface_csv.exists():
        from .config import parse_config

        cfg = parse_config(run_dir / "config.cfg")
        theta = cfg.surface.theta if cfg.surface.theta >= 0 else cfg.agents.theta_base
        written.append(render_surface(surface_csv, run_dir / "surface.svg", theta, cfg.surface.p_fixed))
    return written
