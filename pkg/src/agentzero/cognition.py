"""Per-agent cognitive machinery: affect, risk memory, thresholds, disposition."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError

GAMMA_MIN = 0.05
AGE_MIN = 18.0
AGE_MAX = 100.0


class Mode(str, enum.Enum):
    QUIET = "QUIET"
    FIGHT = "FIGHT"
    FLIGHT = "FLIGHT"


@dataclass(frozen=True)
class RWParams:
    alpha_rw: float = 0.5
    beta_rw: float = 0.6

    def __post_init__(self) -> None:
        for name in ("alpha_rw", "beta_rw"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ConfigError(f"agents.{name}", "must lie in (0,1]", v)

    @property
    def rate(self) -> float:
        return self.alpha_rw * self.beta_rw


@dataclass
class AgentProfile:
    agent_id: int
    mobile: bool
    age: float
    gamma: float
    memory_length: int
    sampling_radius: int
    flight_threshold: float
    theta_base: float

    def __post_init__(self) -> None:
        if self.memory_length < 1:
            raise ConfigError(f"agent.{self.agent_id}.memory_length", "must be >= 1", self.memory_length)
        if not GAMMA_MIN <= self.gamma <= 1.0:
            raise ConfigError(f"agent.{self.agent_id}.gamma", f"must lie in [{GAMMA_MIN},1]", self.gamma)


@dataclass
class CognitiveState:
    position: tuple[int, int]
    memory_length: int
    affect: float = 0.0
    probability: float = 0.0
    contagion_in: float = 0.0
    disposition: float = 0.0
    mode: Mode = Mode.QUIET
    damage: float = 0.0
    radius: int = 1
    memory: deque = field(init=False)

    def __post_init__(self) -> None:
        self.memory = deque(maxlen=self.memory_length)

    @property
    def solo(self) -> float:
        return self.affect + self.probability


def draw_age(rng: np.random.Generator, mean: float = 35.0, sd: float = 12.0) -> float:
    return float(np.clip(rng.normal(mean, sd), AGE_MIN, AGE_MAX))


def impulse_control_from_age(age: float) -> float:
    if age < AGE_MIN:
        raise ConfigError("age", f"must be >= {AGE_MIN:g}", age)
    return min(1.0, max(GAMMA_MIN, 1.0 - (age - AGE_MIN) / 100.0))


def rescorla_wagner_update(affect: float, stimulus: int, params: RWParams) -> float:
    """One conditioning trial: move affect toward the binary stimulus."""
    return affect + params.rate * (stimulus - affect)


def update_probability(memory: deque, new_observation: float) -> float:
    """Push an observation and return the mean of the retained window.

    During warm-up (fewer than ``maxlen`` entries) the mean runs over the
    entries seen so far.
    """
    memory.append(new_observation)
    return math.fsum(memory) / len(memory)


def destructive_radius(affect: float, endogenous: bool = True, fixed_radius: int = 1) -> int:
    if not endogenous:
        return fixed_radius
    return math.floor(1.0 + 4.0 * affect)


def activation_threshold(profile: AgentProfile, age_enabled: bool = True) -> float:
    if not age_enabled:
        return profile.theta_base
    return profile.theta_base / profile.gamma


def compute_disposition(
    affect: float,
    probability: float,
    contagion: float,
    theta: float,
    damage: float = 0.0,
    damage_penalty_coeff: float = 0.0,
) -> float:
    d = affect + probability + contagion - theta
    if damage_penalty_coeff and damage:
        d -= damage_penalty_coeff * damage
    return d


def choose_mode(disposition: float, probability: float, p_flight: float, flight_enabled: bool) -> Mode:
    if disposition > 0:
        return Mode.FIGHT
    if flight_enabled and probability >= p_flight:
        return Mode.FLIGHT
    return Mode.QUIET


def disposition_surface(
    affects: Sequence[float], contagions: Sequence[float], p_fixed: float, theta_fixed: float
) -> np.ndarray:
    """Disposition over an affect x contagion grid, indexed ``[a, c]``."""
    if len(affects) == 0 or len(contagions) == 0:
        raise ValueError("surface axes must be nonempty")
    a = np.asarray(affects, dtype=float)[:, None]
    c = np.asarray(contagions, dtype=float)[None, :]
    return a + p_fixed + c - theta_fixed


@dataclass
class Agent:
    profile: AgentProfile
    state: CognitiveState
    rng: np.random.Generator = field(repr=False)

    @property
    def agent_id(self) -> int:
        return self.profile.agent_id
