import copy

from agentzero.engine import _apply_forcing
from agentzero.environment import extinguish, seed_attacks


def post_environment_grid(state):
    """The grid as agents will perceive it on the next step (phases 1-2 replayed on a copy)."""
    s = copy.deepcopy(state)
    seed_attacks(s.grid, s.config.environment.attack_rate, s.env_rng)
    extinguish(s.grid, s.config.environment.extinction_rate, s.env_rng)
    _apply_forcing(s)
    return s.grid


def run_bytes(result, tmp_dir):
    """Every deterministic output file of a run, keyed by name."""
    from agentzero.output import write_run

    write_run(result, tmp_dir)
    return {p.name: p.read_bytes() for p in sorted(tmp_dir.iterdir()) if p.name != "manifest.json"}
