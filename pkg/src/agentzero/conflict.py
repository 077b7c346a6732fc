"""Agent actions: fight, flight, random walk, and retaliatory damage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cognition import Agent
from .environment import Coord, Grid, activation_field, destroy_disc
from .errors import ConfigError

# Moore steps in row-major order
MOORE_STEPS: tuple[Coord, ...] = tuple(
    (dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0)
)


@dataclass(frozen=True)
class ConflictParams:
    alpha_aggr: float = 0.5
    beta_ret: float = 0.5
    damage_decay: float = 0.98
    flight_radius: int = 5
    fixed_radius: int = 1
    damage_penalty_coeff: float = 0.1

    def __post_init__(self) -> None:
        for name in ("alpha_aggr", "beta_ret", "damage_penalty_coeff"):
            if getattr(self, name) < 0:
                raise ConfigError(f"conflict.{name}", "must be >= 0", getattr(self, name))
        if not 0.0 <= self.damage_decay <= 1.0:
            raise ConfigError("conflict.damage_decay", "must lie in [0,1]", self.damage_decay)
        if self.flight_radius < 0:
            raise ConfigError("conflict.flight_radius", "must be >= 0", self.flight_radius)
        if self.fixed_radius < 0:
            raise ConfigError("conflict.fixed_radius", "must be >= 0", self.fixed_radius)


@dataclass
class AttackEvent:
    tick: int
    attacker: int
    center: Coord
    radius: int
    patches_destroyed: int
    harmed: list[int] = field(default_factory=list)


def chebyshev(a: Coord, b: Coord, width: int, height: int) -> int:
    dx = abs(a[0] - b[0]) % width
    dy = abs(a[1] - b[1]) % height
    return max(min(dx, width - dx), min(dy, height - dy))


def execute_fight(agent: Agent, grid: Grid, positions: Sequence[Coord], tick: int = 0) -> AttackEvent:
    """Destroy the disc around the agent and list the other agents caught in it.

    ``positions`` is the phase-start snapshot of every agent's position,
    indexed by agent id.
    """
    center = agent.state.position
    radius = agent.state.radius
    destroyed = destroy_disc(grid, center, radius)
    harmed = [
        j
        for j, pos in enumerate(positions)
        if j != agent.agent_id and chebyshev(center, pos, grid.width, grid.height) <= radius
    ]
    return AttackEvent(tick, agent.agent_id, center, radius, destroyed, harmed)


def inflicted_damage(ic_attacker: float, alpha_aggr: float) -> float:
    return alpha_aggr * (1.0 - ic_attacker)


def accumulate_retaliation(attacker: Agent, harmed: Sequence[Agent], params: ConflictParams) -> float:
    """Charge the attacker for every harmed neighbor and damage each of them.

    Returns the attacker's retaliation increment.
    """
    ids = [h.agent_id for h in harmed]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate harmed agents: {ids}")
    hit = inflicted_damage(attacker.profile.gamma, params.alpha_aggr)
    r = 0.0
    for h in harmed:
        r += params.beta_ret * (1.0 - h.profile.gamma)
        h.state.damage += hit
    attacker.state.damage += r
    return r


def decay_damage(agent: Agent, damage_decay: float) -> None:
    agent.state.damage *= damage_decay


def execute_flight(agent: Agent, grid: Grid, flight_radius: int, rng: np.random.Generator) -> Coord:
    """Move to the least-activated cell within ``flight_radius``.

    Ties are broken uniformly (one draw from ``rng``) over the tied cells in
    row-major order.
    """
    if not agent.profile.mobile:
        return agent.state.position
    x, y = agent.state.position
    field_ = activation_field(grid, (x, y), flight_radius, agent.profile.sampling_radius)
    ties = np.flatnonzero(field_.ravel() == field_.min())
    pick = int(ties[rng.integers(len(ties))])
    dy, dx = divmod(pick, 2 * flight_radius + 1)
    dest = ((x + dx - flight_radius) % grid.width, (y + dy - flight_radius) % grid.height)
    agent.state.position = dest
    return dest


def random_walk(agent: Agent, rng: np.random.Generator, width: int, height: int) -> Coord:
    if not agent.profile.mobile:
        return agent.state.position
    dx, dy = MOORE_STEPS[int(rng.integers(8))]
    x, y = agent.state.position
    agent.state.position = ((x + dx) % width, (y + dy) % height)
    return agent.state.position
