"""Model state, the per-tick phase loop, RNG streams, and shocks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cognition as cog
from .cognition import Agent, AgentProfile, CognitiveState, Mode
from .config import SimConfig, validate
from .conflict import (
    AttackEvent,
    accumulate_retaliation,
    decay_damage,
    execute_fight,
    execute_flight,
    random_walk,
)
from .environment import (
    Grid,
    PatchState,
    extinguish,
    local_activation_fraction,
    seed_attacks,
)
from .network import (
    TieMatrix,
    average_tie_strength,
    contagion_all,
    homophily_update,
    tie_strength_dispersion,
)

STREAM_ROLES = {"environment": 0, "agent": 1, "shock": 2}


def make_stream(seed: int, role: str, agent_id: int = 0) -> np.random.Generator:
    """Independent generator that is a pure function of (seed, role, agent id)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(STREAM_ROLES[role], agent_id))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class AgentRecord:
    agent_id: int
    affect: float
    probability: float
    contagion: float
    disposition: float
    mode: Mode
    x: int
    y: int
    radius: int
    damage: float


@dataclass(frozen=True)
class MetricsFrame:
    tick: int
    agents: tuple[AgentRecord, ...]
    destroyed_count: int
    active_count: int
    avg_tie_strength: float | None
    tie_strength_dispersion: float | None
    mean_contagion: float


@dataclass
class ModelState:
    config: SimConfig
    grid: Grid
    agents: list[Agent]
    ties: TieMatrix
    env_rng: np.random.Generator
    shock_rng: np.random.Generator
    tick: int = 0
    prev_solo: list[float] = field(default_factory=list)
    events: list[AttackEvent] = field(default_factory=list)


def _build_agent(cfg: SimConfig, agent_id: int) -> Agent:
    ag = cfg.agents
    ov = cfg.override_for(agent_id)
    rng = make_stream(cfg.run.seed, "agent", agent_id)
    # draws happen unconditionally so overrides never shift the behaviour stream
    age = cog.draw_age(rng, ag.age_mean, ag.age_sd)
    pos = (int(rng.integers(cfg.environment.width)), int(rng.integers(cfg.environment.height)))
    if ov.age is not None:
        age = ov.age
    if ov.x is not None:
        pos = (ov.x, ov.y)
    mobile = agent_id not in ag.immobile if ov.mobile is None else ov.mobile
    memory_length = 1
    if cfg.extensions.memory:
        memory_length = ov.memory_length if ov.memory_length is not None else ag.memory_length
    profile = AgentProfile(
        agent_id=agent_id,
        mobile=mobile,
        age=age,
        gamma=cog.impulse_control_from_age(age),
        memory_length=memory_length,
        sampling_radius=ag.sampling_radius,
        flight_threshold=ag.p_flight,
        theta_base=ag.theta_base,
    )
    state = CognitiveState(position=pos, memory_length=memory_length)
    state.radius = cog.destructive_radius(0.0, cfg.extensions.endogenous_radius, cfg.conflict.fixed_radius)
    return Agent(profile, state, rng)


def init_model(config: SimConfig) -> ModelState:
    validate(config)
    n = config.agents.n_agents
    agents = [_build_agent(config, i) for i in range(n)]
    return ModelState(
        config=config,
        grid=Grid(config.environment.width, config.environment.height),
        agents=agents,
        ties=TieMatrix.uniform(n),
        env_rng=make_stream(config.run.seed, "environment"),
        shock_rng=make_stream(config.run.seed, "shock"),
        prev_solo=[0.0] * n,
    )


def apply_shock(state: ModelState, magnitude: float, mode: str, rng: np.random.Generator) -> None:
    if mode == "uniform":
        bumps = [magnitude] * len(state.agents)
    elif mode == "per_agent_random":
        bumps = [float(rng.uniform(0.0, magnitude)) for _ in state.agents]
    else:
        raise ValueError(f"unknown shock mode {mode!r}")
    for agent, bump in zip(state.agents, bumps):
        agent.state.affect = min(1.0, agent.state.affect + bump)


def _apply_forcing(state: ModelState) -> None:
    fo = state.config.forcing
    if not (fo.enabled and fo.start <= state.tick <= fo.end):
        return
    g = state.grid
    ys = np.arange(fo.y, fo.y + fo.height) % g.height
    xs = np.arange(fo.x, fo.x + fo.width) % g.width
    idx = np.ix_(ys, xs)
    block = g.cells[idx]
    block[block != PatchState.DESTROYED] = PatchState.ACTIVE
    g.cells[idx] = block


def step(state: ModelState) -> MetricsFrame:
    cfg = state.config
    ext = cfg.extensions
    grid = state.grid
    agents = state.agents
    t = state.tick
    if t >= cfg.run.n_ticks:
        raise RuntimeError(f"tick {t} beyond n_ticks={cfg.run.n_ticks}")

    # 1-2: environment
    seed_attacks(grid, cfg.environment.attack_rate, state.env_rng)
    extinguish(grid, cfg.environment.extinction_rate, state.env_rng)
    _apply_forcing(state)

    # 3-5: perception, affect learning, risk memory
    rw = cfg.rw_params
    for a in agents:
        s = a.state
        frac = local_activation_fraction(grid, s.position, a.profile.sampling_radius)
        stimulus = 1 if frac > 0 else 0
        s.affect = cog.rescorla_wagner_update(s.affect, stimulus, rw)
        s.probability = cog.update_probability(s.memory, frac)

    # 6: contagion from last tick's committed solo dispositions and ties
    contagion = contagion_all(state.ties, state.prev_solo)

    # 7: disposition and mode
    penalty = cfg.conflict.damage_penalty_coeff if ext.retaliation else 0.0
    for a, c in zip(agents, contagion):
        s = a.state
        s.contagion_in = c
        theta = cog.activation_threshold(a.profile, ext.age_impulse)
        s.disposition = cog.compute_disposition(s.affect, s.probability, c, theta, s.damage, penalty)
        s.mode = cog.choose_mode(s.disposition, s.probability, a.profile.flight_threshold, ext.flight)
        s.radius = cog.destructive_radius(s.affect, ext.endogenous_radius, cfg.conflict.fixed_radius)

    # 8: actions in id order against a phase-start position snapshot
    positions = [a.state.position for a in agents]
    events: list[AttackEvent] = []
    for a in agents:
        mode = a.state.mode
        if mode is Mode.FIGHT:
            events.append(execute_fight(a, grid, positions, t))
        elif mode is Mode.FLIGHT:
            execute_flight(a, grid, cfg.conflict.flight_radius, a.rng)
        elif a.profile.mobile:
            random_walk(a, a.rng, grid.width, grid.height)

    # 9: retaliation
    if ext.retaliation:
        for ev in events:
            accumulate_retaliation(agents[ev.attacker], [agents[j] for j in ev.harmed], cfg.conflict)
        for a in agents:
            decay_damage(a, cfg.conflict.damage_decay)
    state.events.extend(events)

    # 10: homophily
    if ext.homophily:
        state.ties = homophily_update(state.ties, [a.state.affect for a in agents], cfg.network.alpha_hom)

    # 11: shocks
    sh = cfg.shocks
    if ext.shocks and t > 0 and t % sh.period == 0:
        apply_shock(state, sh.magnitude, sh.mode, state.shock_rng)

    # 12: emit
    state.prev_solo = [a.state.solo for a in agents]
    counts = grid.counts()
    frame = MetricsFrame(
        tick=t,
        agents=tuple(
            AgentRecord(
                agent_id=a.agent_id,
                affect=a.state.affect,
                probability=a.state.probability,
                contagion=a.state.contagion_in,
                disposition=a.state.disposition,
                mode=a.state.mode,
                x=a.state.position[0],
                y=a.state.position[1],
                radius=a.state.radius,
                damage=a.state.damage,
            )
            for a in agents
        ),
        destroyed_count=counts[PatchState.DESTROYED],
        active_count=counts[PatchState.ACTIVE],
        avg_tie_strength=average_tie_strength(state.ties),
        tie_strength_dispersion=tie_strength_dispersion(state.ties),
        mean_contagion=math.fsum(contagion) / len(contagion),
    )
    state.tick += 1
    return frame


@dataclass
class RunResult:
    config: SimConfig
    frames: list[MetricsFrame]
    events: list[AttackEvent]
    grid: Grid
    ties: list[np.ndarray] | None = None  # per-tick committed weights when recorded


def run(config: SimConfig, record_ties: bool | None = None) -> RunResult:
    """Run ``config.run.n_ticks`` ticks and return all frames and events."""
    state = init_model(config)
    if record_ties is None:
        record_ties = config.output.network_dump
    frames = []
    ties = [] if record_ties else None
    for _ in range(config.run.n_ticks):
        frames.append(step(state))
        if ties is not None:
            ties.append(state.ties.weights.copy())
    return RunResult(config, frames, state.events, state.grid, ties)
