"""Scenario configuration: typed dataclasses, validation, and the ``.cfg`` format.

A scenario file is an INI document. Every field below maps to exactly one
``section.key``; absent keys take their defaults and unknown keys are
rejected. Per-agent overrides live in ``[agent.<id>]`` sections. An optional
``[arms]`` section turns the file into a paired experiment: each key names
an arm, each value is a ``;``-separated list of ``section.key=value``
overrides applied on top of the base document.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import os
import typing
from dataclasses import dataclass, field
from pathlib import Path

from .cognition import AGE_MIN, RWParams
from .conflict import ConflictParams
from .environment import EnvParams
from .errors import ConfigError

SHOCK_MODES = ("uniform", "per_agent_random")
MAX_ENDOGENOUS_RADIUS = 5


@dataclass(frozen=True)
class EnvironmentConfig:
    width: int = 50
    height: int = 50
    attack_rate: float = 0.01
    extinction_rate: float = 0.05


@dataclass(frozen=True)
class AgentsConfig:
    n_agents: int = 3
    immobile: tuple[int, ...] = (0,)
    age_mean: float = 35.0
    age_sd: float = 12.0
    memory_length: int = 5
    sampling_radius: int = 1
    p_flight: float = 0.03
    theta_base: float = 0.6
    alpha_rw: float = 0.5
    beta_rw: float = 0.6


@dataclass(frozen=True)
class AgentOverride:
    age: float | None = None
    mobile: bool | None = None
    memory_length: int | None = None
    x: int | None = None
    y: int | None = None


@dataclass(frozen=True)
class NetworkConfig:
    alpha_hom: float = 0.05


@dataclass(frozen=True)
class Extensions:
    age_impulse: bool = True
    endogenous_radius: bool = True
    flight: bool = True
    memory: bool = True
    retaliation: bool = True
    coupling_surface_output: bool = False
    homophily: bool = True
    shocks: bool = False


EXTENSION_FLAGS = tuple(f.name for f in dataclasses.fields(Extensions))


@dataclass(frozen=True)
class ShockConfig:
    period: int = 200
    magnitude: float = 0.5
    mode: str = "per_agent_random"


@dataclass(frozen=True)
class ForcingConfig:
    """Scripted threat block held Active for ticks ``start..end`` inclusive."""

    start: int = -1
    end: int = -1
    x: int = 0
    y: int = 0
    width: int = 0
    height: int = 0

    @property
    def enabled(self) -> bool:
        return self.width > 0 and self.height > 0 and self.start >= 0


@dataclass(frozen=True)
class SurfaceConfig:
    resolution: int = 50
    p_fixed: float = 0.2
    theta: float = -1.0  # negative: use agents.theta_base


@dataclass(frozen=True)
class RunConfig:
    n_ticks: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class OutputConfig:
    network_dump: bool = False
    plots: bool = True


@dataclass(frozen=True)
class SimConfig:
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    agents: AgentsConfig = field(default_factory=AgentsConfig)
    conflict: ConflictParams = field(default_factory=ConflictParams)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    extensions: Extensions = field(default_factory=Extensions)
    shocks: ShockConfig = field(default_factory=ShockConfig)
    forcing: ForcingConfig = field(default_factory=ForcingConfig)
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    run: RunConfig = field(default_factory=RunConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    overrides: tuple[tuple[int, AgentOverride], ...] = ()
    arms: tuple[tuple[str, str], ...] = ()

    @property
    def env_params(self) -> EnvParams:
        return EnvParams(self.environment.attack_rate, self.environment.extinction_rate)

    @property
    def rw_params(self) -> RWParams:
        return RWParams(self.agents.alpha_rw, self.agents.beta_rw)

    def override_for(self, agent_id: int) -> AgentOverride:
        for i, ov in self.overrides:
            if i == agent_id:
                return ov
        return AgentOverride()

    def with_flags(self, **flags: bool) -> "SimConfig":
        return dataclasses.replace(self, extensions=dataclasses.replace(self.extensions, **flags))

    def with_seed(self, seed: int) -> "SimConfig":
        return dataclasses.replace(self, run=dataclasses.replace(self.run, seed=seed))

    def replace(self, section: str, **values) -> "SimConfig":
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **values)})

    def config_hash(self) -> str:
        return hashlib.sha256(serialize_config(self).encode("utf-8")).hexdigest()


SECTIONS: dict[str, type] = {
    "environment": EnvironmentConfig,
    "agents": AgentsConfig,
    "conflict": ConflictParams,
    "network": NetworkConfig,
    "extensions": Extensions,
    "shocks": ShockConfig,
    "forcing": ForcingConfig,
    "surface": SurfaceConfig,
    "run": RunConfig,
    "output": OutputConfig,
}


# --- value codecs ---------------------------------------------------------

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _decode(key: str, raw: str, hint) -> object:
    raw = raw.strip()
    args = typing.get_args(hint)
    if type(None) in args:
        inner = next(a for a in args if a is not type(None))
        if raw == "":
            return None
        return _decode(key, raw, inner)
    try:
        if hint is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if hint is int:
            return int(raw)
        if hint is float:
            return float(raw)
        if hint is str:
            return raw
        if typing.get_origin(hint) is tuple:
            return tuple(int(p) for p in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(key, f"expected {getattr(hint, '__name__', hint)}", raw) from None
    raise TypeError(f"no codec for {hint!r}")


def _encode(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


def _build_section(name: str, cls: type, items: dict[str, str]):
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    for key in items:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    values = {k: _decode(f"{name}.{k}", v, hints[k]) for k, v in items.items()}
    try:
        return cls(**values)
    except ConfigError as exc:
        # re-anchor errors raised by shared param types onto this section
        key = exc.key.split(".")[-1]
        raise ConfigError(f"{name}.{key}", exc.constraint, exc.value) from None


# --- document <-> config --------------------------------------------------


def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    cp.optionxform = str  # keep keys case-sensitive
    return cp


def config_from_parser(cp: configparser.ConfigParser) -> SimConfig:
    built: dict[str, object] = {}
    overrides: list[tuple[int, AgentOverride]] = []
    arms: tuple[tuple[str, str], ...] = ()
    for section in cp.sections():
        items = dict(cp.items(section))
        if section in SECTIONS:
            built[section] = _build_section(section, SECTIONS[section], items)
        elif section.startswith("agent."):
            ident = section.split(".", 1)[1]
            if not ident.isdigit():
                raise ConfigError(section, "agent override section needs an integer id")
            overrides.append((int(ident), _build_section(section, AgentOverride, items)))
        elif section == "arms":
            arms = tuple((k, v) for k, v in items.items())
        else:
            raise ConfigError(section, "unknown section")
    cfg = SimConfig(**built, overrides=tuple(sorted(overrides)), arms=arms)
    validate(cfg)
    return cfg


def config_to_parser(cfg: SimConfig) -> configparser.ConfigParser:
    cp = _new_parser()
    for name in SECTIONS:
        section = getattr(cfg, name)
        cp[name] = {f.name: _encode(getattr(section, f.name)) for f in dataclasses.fields(section)}
    for agent_id, ov in cfg.overrides:
        cp[f"agent.{agent_id}"] = {
            f.name: _encode(getattr(ov, f.name))
            for f in dataclasses.fields(ov)
            if getattr(ov, f.name) is not None
        }
    if cfg.arms:
        cp["arms"] = dict(cfg.arms)
    return cp


def serialize_config(cfg: SimConfig) -> str:
    buf = io.StringIO()
    config_to_parser(cfg).write(buf)
    return buf.getvalue()


def parse_config_text(text: str, source: str = "<string>") -> SimConfig:
    cp = _new_parser()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(source, f"malformed config: {exc}") from None
    return config_from_parser(cp)


def parse_config(path: str | os.PathLike) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, source=str(path))


# --- arms -----------------------------------------------------------------


def _parse_overrides(arm: str, assignments: str) -> list[tuple[str, str, str]]:
    out = []
    for part in assignments.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"arms.{arm}", "override must look like section.key=value", part)
        path, value = part.split("=", 1)
        section, _, key = path.strip().rpartition(".")
        if not section:
            raise ConfigError(f"arms.{arm}", "override path needs a section", path)
        out.append((section, key, value.strip()))
    return out


def apply_overrides(cfg: SimConfig, assignments: str, label: str = "override") -> SimConfig:
    cp = config_to_parser(dataclasses.replace(cfg, arms=()))
    for section, key, value in _parse_overrides(label, assignments):
        if not cp.has_section(section):
            cp.add_section(section)
        cp[section][key] = value
    return config_from_parser(cp)


def expand_arms(cfg: SimConfig) -> list[tuple[str, SimConfig]]:
    """Resolve a paired-experiment config into one config per arm."""
    if not cfg.arms:
        return [("main", cfg)]
    return [(name, apply_overrides(cfg, assignments, f"arms.{name}")) for name, assignments in cfg.arms]


# --- validation -----------------------------------------------------------


def _prob(key: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ConfigError(key, "must lie in [0,1]", v)


def _fits(key: str, radius: int, env: EnvironmentConfig) -> None:
    if radius < 0:
        raise ConfigError(key, "must be >= 0", radius)
    if 2 * radius + 1 > min(env.width, env.height):
        raise ConfigError(key, f"disc of side {2 * radius + 1} exceeds the {env.width}x{env.height} grid", radius)


def validate(cfg: SimConfig) -> None:
    env, ag = cfg.environment, cfg.agents
    if env.width < 1:
        raise ConfigError("environment.width", "must be >= 1", env.width)
    if env.height < 1:
        raise ConfigError("environment.height", "must be >= 1", env.height)
    _prob("environment.attack_rate", env.attack_rate)
    _prob("environment.extinction_rate", env.extinction_rate)

    if ag.n_agents < 1:
        raise ConfigError("agents.n_agents", "must be >= 1", ag.n_agents)
    for i in ag.immobile:
        if not 0 <= i < ag.n_agents:
            raise ConfigError("agents.immobile", f"agent ids must lie in [0,{ag.n_agents})", i)
    if ag.age_sd < 0:
        raise ConfigError("agents.age_sd", "must be >= 0", ag.age_sd)
    if ag.memory_length < 1:
        raise ConfigError("agents.memory_length", "must be >= 1", ag.memory_length)
    _prob("agents.p_flight", ag.p_flight)
    if ag.theta_base < 0:
        raise ConfigError("agents.theta_base", "must be >= 0", ag.theta_base)
    for name in ("alpha_rw", "beta_rw"):
        v = getattr(ag, name)
        if not 0.0 < v <= 1.0:
            raise ConfigError(f"agents.{name}", "must lie in (0,1]", v)
    _fits("agents.sampling_radius", ag.sampling_radius, env)

    for i, ov in cfg.overrides:
        if not 0 <= i < ag.n_agents:
            raise ConfigError(f"agent.{i}", f"agent id must lie in [0,{ag.n_agents})", i)
        if ov.age is not None and ov.age < AGE_MIN:
            raise ConfigError(f"agent.{i}.age", f"must be >= {AGE_MIN:g}", ov.age)
        if ov.memory_length is not None and ov.memory_length < 1:
            raise ConfigError(f"agent.{i}.memory_length", "must be >= 1", ov.memory_length)
        if (ov.x is None) != (ov.y is None):
            raise ConfigError(f"agent.{i}.x/y", "position needs both x and y")
        if ov.x is not None and not (0 <= ov.x < env.width and 0 <= ov.y < env.height):
            raise ConfigError(f"agent.{i}.x/y", "position outside the grid", (ov.x, ov.y))

    if cfg.extensions.endogenous_radius:
        _fits("extensions.endogenous_radius", MAX_ENDOGENOUS_RADIUS, env)
    else:
        _fits("conflict.fixed_radius", cfg.conflict.fixed_radius, env)
    _fits("conflict.flight_radius", cfg.conflict.flight_radius, env)
    if cfg.network.alpha_hom <= 0:
        raise ConfigError("network.alpha_hom", "must be > 0", cfg.network.alpha_hom)

    sh = cfg.shocks
    if sh.period < 1:
        raise ConfigError("shocks.period", "must be >= 1", sh.period)
    if sh.magnitude < 0:
        raise ConfigError("shocks.magnitude", "must be >= 0", sh.magnitude)
    if sh.mode not in SHOCK_MODES:
        raise ConfigError("shocks.mode", f"must be one of {SHOCK_MODES}", sh.mode)

    fo = cfg.forcing
    if fo.enabled:
        if fo.end < fo.start:
            raise ConfigError("forcing.end", "must be >= forcing.start", fo.end)
        if fo.width > env.width or fo.height > env.height:
            raise ConfigError("forcing.width/height", "block larger than the grid", (fo.width, fo.height))

    if cfg.surface.resolution < 2:
        raise ConfigError("surface.resolution", "must be >= 2", cfg.surface.resolution)
    _prob("surface.p_fixed", cfg.surface.p_fixed)

    if cfg.run.n_ticks < 1:
        raise ConfigError("run.n_ticks", "must be >= 1", cfg.run.n_ticks)
    if cfg.run.seed < 0:
        raise ConfigError("run.seed", "must be >= 0", cfg.run.seed)
