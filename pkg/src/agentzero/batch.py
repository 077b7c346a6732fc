"""Per-run summary statistics, seed sweeps and paired-seed comparisons."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .cognition import Mode
from .config import SimConfig
from .engine import RunResult, run

SUMMARY_KEYS = (
    "final_destroyed", "fight_ticks", "flight_ticks", "first_fight_tick",
    "n_attacks", "mean_affect", "peak_disposition", "final_avg_tie_strength",
    "final_tie_dispersion", "mean_contagion", "max_damage",
)


def summarize(result: RunResult) -> dict[str, float]:
    frames = result.frames
    n = len(frames[0].agents)
    fights = [0] * n
    flights = [0] * n
    first = [-1] * n
    affect_sum = 0.0
    peak = -math.inf
    max_damage = 0.0
    for f in frames:
        for a in f.agents:
            i = a.agent_id
            if a.mode is Mode.FIGHT:
                fights[i] += 1
                if first[i] < 0:
                    first[i] = f.tick
            elif a.mode is Mode.FLIGHT:
                flights[i] += 1
            affect_sum += a.affect
            peak = max(peak, a.disposition)
            max_damage = max(max_damage, a.damage)
    firsts = [t for t in first if t >= 0]
    last = frames[-1]
    out: dict[str, float] = {
        "final_destroyed": last.destroyed_count,
        "fight_ticks": sum(fights),
        "flight_ticks": sum(flights),
        "first_fight_tick": min(firsts) if firsts else -1,
        "n_attacks": len(result.events),
        "mean_affect": affect_sum / (n * len(frames)),
        "peak_disposition": peak,
        "final_avg_tie_strength": last.avg_tie_strength if last.avg_tie_strength is not None else math.nan,
        "final_tie_dispersion": last.tie_strength_dispersion if last.tie_strength_dispersion is not None else math.nan,
        "mean_contagion": math.fsum(f.mean_contagion for f in frames) / len(frames),
        "max_damage": max_damage,
    }
    for i in range(n):
        out[f"fight_ticks_a{i}"] = fights[i]
        out[f"first_fight_a{i}"] = first[i]
    return out


def _run_summary(cfg: SimConfig) -> dict[str, float]:
    return summarize(run(cfg, record_ties=False))


def sweep(cfg: SimConfig, seeds: Sequence[int], parallel: int = 1) -> list[dict[str, float]]:
    """Summaries for ``cfg`` at each seed, ordered by seed."""
    cfgs = [cfg.with_seed(s) for s in seeds]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            summaries = list(pool.map(_run_summary, cfgs))
    else:
        summaries = [_run_summary(c) for c in cfgs]
    rows = [{"seed": s, **summ} for s, summ in zip(seeds, summaries)]
    rows.sort(key=lambda r: r["seed"])
    return rows


def compare(
    cfg_a: SimConfig, cfg_b: SimConfig, seeds: Sequence[int], parallel: int = 1
) -> list[dict[str, float]]:
    """Paired-seed contrast: both arms share every RNG stream at each seed.

    Each row carries both arms' summaries and ``delta_<key> = b - a``.
    """
    rows_a = sweep(cfg_a, seeds, parallel)
    rows_b = sweep(cfg_b, seeds, parallel)
    out = []
    for ra, rb in zip(rows_a, rows_b):
        row: dict[str, float] = {"seed": ra["seed"]}
        keys = [k for k in ra if k != "seed" and k in rb]
        for k in keys:
            row[f"a_{k}"] = ra[k]
            row[f"b_{k}"] = rb[k]
        for k in keys:
            row[f"delta_{k}"] = rb[k] - ra[k]
        out.append(row)
    return out


def parse_seed_range(text: str) -> list[int]:
    """``"1..20"`` -> [1, ..., 20]; a bare integer gives a single seed."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
        if b < a:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(a, b + 1))
    return [int(text)]
