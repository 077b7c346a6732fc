"""CSV, snapshot and manifest emission for a finished run."""

from __future__ import annotations

import csv
import datetime as dt
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .cognition import disposition_surface
from .config import SimConfig, serialize_config
from .conflict import AttackEvent
from .engine import MetricsFrame, RunResult

AGENT_COLUMNS = (
    "tick", "agent_id", "affect", "probability", "contagion", "disposition",
    "mode", "x", "y", "radius", "damage",
)
GLOBAL_COLUMNS = (
    "tick", "destroyed_count", "active_count", "avg_tie_strength",
    "tie_strength_dispersion", "mean_contagion",
)
ATTACK_COLUMNS = ("tick", "attacker", "x", "y", "radius", "patches_destroyed", "n_harmed")
NETWORK_COLUMNS = ("tick", "i", "j", "w")
SURFACE_COLUMNS = ("affect", "contagion", "disposition")


def fmt(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.6f}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return path


def export_timeseries(frames: Sequence[MetricsFrame], out_dir: Path) -> tuple[Path, Path]:
    if not frames:
        raise ValueError("no frames to export")
    agent_rows = (
        (
            f.tick, a.agent_id, fmt(a.affect), fmt(a.probability), fmt(a.contagion),
            fmt(a.disposition), a.mode.value, a.x, a.y, a.radius, fmt(a.damage),
        )
        for f in frames
        for a in f.agents
    )
    global_rows = (
        (
            f.tick, f.destroyed_count, f.active_count, fmt(f.avg_tie_strength),
            fmt(f.tie_strength_dispersion), fmt(f.mean_contagion),
        )
        for f in frames
    )
    return (
        _write_csv(out_dir / "agents.csv", AGENT_COLUMNS, agent_rows),
        _write_csv(out_dir / "global.csv", GLOBAL_COLUMNS, global_rows),
    )


def export_attacks(events: Sequence[AttackEvent], out_dir: Path) -> Path:
    rows = (
        (e.tick, e.attacker, e.center[0], e.center[1], e.radius, e.patches_destroyed, len(e.harmed))
        for e in events
    )
    return _write_csv(out_dir / "attacks.csv", ATTACK_COLUMNS, rows)


def export_network(ties: Sequence[np.ndarray], out_dir: Path) -> Path:
    def rows():
        for t, w in enumerate(ties):
            n = w.shape[0]
            for i in range(n):
                for j in range(n):
                    if i != j:
                        yield t, i, j, fmt(float(w[i, j]))

    return _write_csv(out_dir / "network.csv", NETWORK_COLUMNS, rows())


def surface_axes(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray, float, float]:
    res = cfg.surface.resolution
    theta = cfg.surface.theta if cfg.surface.theta >= 0 else cfg.agents.theta_base
    axis = np.linspace(0.0, 1.0, res)
    return axis, axis.copy(), cfg.surface.p_fixed, theta


def export_surface(cfg: SimConfig, out_dir: Path) -> Path:
    affects, contagions, p_fixed, theta = surface_axes(cfg)
    d = disposition_surface(affects, contagions, p_fixed, theta)
    rows = (
        (fmt(a), fmt(c), fmt(d[i, j]))
        for i, a in enumerate(affects)
        for j, c in enumerate(contagions)
    )
    return _write_csv(out_dir / "surface.csv", SURFACE_COLUMNS, rows)


def write_snapshot(result: RunResult, out_dir: Path) -> tuple[Path, Path]:
    tick = result.frames[-1].tick if result.frames else 0
    txt = out_dir / "snapshot.txt"
    ppm = out_dir / "snapshot.ppm"
    try:
        txt.write_text(result.grid.to_text(tick), encoding="utf-8", newline="\n")
        ppm.write_bytes(result.grid.to_ppm())
    except OSError as exc:
        raise OSError(f"{out_dir}: {exc.strerror or exc}") from exc
    return txt, ppm


def write_manifest(cfg: SimConfig, out_dir: Path, files: Sequence[Path], started: dt.datetime) -> Path:
    manifest = {
        "config_hash": cfg.config_hash(),
        "master_seed": cfg.run.seed,
        "engine_version": __version__,
        "started": started.isoformat(),
        "finished": dt.datetime.now(dt.timezone.utc).isoformat(),
        "files": sorted(p.name for p in files),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def write_run(result: RunResult, out_dir: str | os.PathLike, started: dt.datetime | None = None) -> list[Path]:
    """Write every artifact of ``result`` into ``out_dir``; return the file list."""
    from .plots import render_plots

    started = started or dt.datetime.now(dt.timezone.utc)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"{out}: {exc.strerror or exc}") from exc
    cfg = result.config
    files: list[Path] = []
    cfg_path = out / "config.cfg"
    cfg_path.write_text(serialize_config(cfg), encoding="utf-8")
    files.append(cfg_path)
    files.extend(export_timeseries(result.frames, out))
    files.append(export_attacks(result.events, out))
    files.extend(write_snapshot(result, out))
    if result.ties is not None:
        files.append(export_network(result.ties, out))
    if cfg.extensions.coupling_surface_output:
        files.append(export_surface(cfg, out))
    if cfg.output.plots:
        files.extend(render_plots(out))
    files.append(write_manifest(cfg, out, files, started))
    return files
