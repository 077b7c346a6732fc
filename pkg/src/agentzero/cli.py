"""Command-line entry point: ``azpp run|sweep|compare|surface|plot``."""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import importlib.resources
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .batch import compare, parse_seed_range, sweep
from .config import SimConfig, expand_arms, parse_config
from .engine import run
from .errors import ConfigError
from .output import export_surface, fmt, write_run
from .plots import render_plots, render_surface

log = logging.getLogger("agentzero")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which we reserve for IO
        self.print_usage(sys.stderr)
        raise UsageError(message)


def scenario_path(name: str) -> Path:
    """Resolve a config argument: a real path first, then a shipped scenario."""
    p = Path(name)
    if p.exists():
        return p
    shipped = importlib.resources.files("agentzero") / "scenarios"
    for candidate in (name, f"{name}.cfg"):
        res = shipped / candidate
        if res.is_file():
            return Path(str(res))
    return p  # let parse_config report the missing file


def load(name: str) -> SimConfig:
    return parse_config(scenario_path(name))


def output_root() -> Path:
    return Path(os.environ.get("AZPP_OUT", "azpp_runs"))


def _write_rows(path: Path, rows: Sequence[dict]) -> Path:
    if not rows:
        raise ValueError("nothing to write")
    header = list(rows[0])
    for r in rows[1:]:
        header.extend(k for k in r if k not in header)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r.get(k)) for k in header])
    return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if v != v else fmt(v)
    return str(v)


def cmd_run(args) -> int:
    cfg = load(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.network_dump:
        cfg = cfg.replace("output", network_dump=True)
    out = Path(args.out) if args.out else output_root() / f"{Path(args.config).stem}_seed{cfg.run.seed}"
    arms = expand_arms(cfg)
    for name, arm_cfg in arms:
        started = dt.datetime.now(dt.timezone.utc)
        result = run(arm_cfg)
        target = out if len(arms) == 1 else out / name
        write_run(result, target, started)
        last = result.frames[-1]
        print(f"{target}: {len(result.frames)} ticks, {len(result.events)} attacks, "
              f"{last.destroyed_count} patches destroyed")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load(args.config)
    seeds = parse_seed_range(args.seeds)
    rows = []
    arms = expand_arms(cfg)
    for name, arm_cfg in arms:
        for r in sweep(arm_cfg, seeds, args.parallel):
            rows.append({"arm": name, **r} if len(arms) > 1 else r)
    out = Path(args.out) if args.out else output_root() / f"sweep_{Path(args.config).stem}"
    path = _write_rows(out / "sweep.csv", rows)
    print(path)
    return EXIT_OK


def cmd_compare(args) -> int:
    if len(args.configs) == 2:
        cfg_a, cfg_b = (load(c) for c in args.configs)
        label = "_vs_".join(Path(c).stem for c in args.configs)
    elif len(args.configs) == 1:
        arms = expand_arms(load(args.configs[0]))
        if len(arms) < 2:
            raise ConfigError("arms", "a single-config compare needs at least two arms")
        (_, cfg_a), (_, cfg_b) = arms[:2]
        label = Path(args.configs[0]).stem
    else:
        raise UsageError("compare takes one two-arm config or two configs")
    rows = compare(cfg_a, cfg_b, parse_seed_range(args.seeds), args.parallel)
    out = Path(args.out) if args.out else output_root() / f"compare_{label}"
    path = _write_rows(out / "compare.csv", rows)
    mean = sum(r["delta_final_destroyed"] for r in rows) / len(rows)
    lower = sum(r["delta_final_destroyed"] < 0 for r in rows)
    print(f"{path}: mean destroyed delta (b-a) {mean:.2f}; b lower in {lower}/{len(rows)} seeds")
    return EXIT_OK


def cmd_surface(args) -> int:
    cfg = load(args.config)
    out = Path(args.out) if args.out else output_root() / f"surface_{Path(args.config).stem}"
    out.mkdir(parents=True, exist_ok=True)
    csv_path = export_surface(cfg, out)
    theta = cfg.surface.theta if cfg.surface.theta >= 0 else cfg.agents.theta_base
    svg = render_surface(csv_path, out / "surface.svg", theta, cfg.surface.p_fixed)
    print(svg)
    return EXIT_OK


def cmd_plot(args) -> int:
    for p in render_plots(args.run_dir):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="azpp", description="Fear-driven collective violence simulator.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario (every arm, if it has several)")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--network-dump", action="store_true", help="write per-tick tie weights")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="per-seed summaries aggregated into one CSV")
    s.add_argument("config")
    s.add_argument("--seeds", required=True, help="range like 1..20")
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="paired-seed two-arm experiment")
    c.add_argument("configs", nargs="+")
    c.add_argument("--seeds", required=True)
    c.add_argument("--parallel", type=int, default=1)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    f = sub.add_parser("surface", help="disposition surface heatmap")
    f.add_argument("config")
    f.add_argument("--out")
    f.set_defaults(func=cmd_surface)

    pl = sub.add_parser("plot", help="re-render SVG plots for a run directory")
    pl.add_argument("run_dir")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help(sys.stderr)
            return EXIT_INVALID
        return args.func(args)
    except UsageError as exc:
        print(f"azpp: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ValueError) as exc:
        print(f"azpp: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"azpp: io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
