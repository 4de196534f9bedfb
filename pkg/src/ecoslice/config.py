"""Experiment configuration: YAML file <-> ExperimentConfig."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .agents import AGENT_NAMES
from .energy import PowerParams
from .traffic import SliceProfile, SliceSpec, SyntheticProfile, TraceError, default_profile


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field."""


@dataclass
class AgentParams:
    epsilon: float = 0.1
    alpha: float = 0.001
    hidden: tuple[int, ...] = (100, 100, 100)
    # start DCMAB outputs at the reward upper bound instead of zero
    optimistic_init: bool = True
    M: float = 0.01
    phi: float = 0.5
    literal_update: bool = False
    context: str = "arm_slot"
    arm_scale: float = 100.0
    slot_scale: float = 0.1
    prior_var: float = 1.0


@dataclass
class ExperimentConfig:
    profile: SyntheticProfile = field(default_factory=default_profile)
    trace_csv: str | None = None
    agents: list[str] = field(default_factory=lambda: list(AGENT_NAMES))
    betas: list[float] = field(default_factory=lambda: [5.0, 1.0, 0.8])
    seeds: list[int] = field(default_factory=lambda: [0])
    J: int = 1000
    sadi_minutes: float = 10.0
    window: int = 50
    output_dir: str = "results"
    eco_ablation: bool = False
    power: PowerParams = field(default_factory=PowerParams)
    reward_energy_scale: float = 1.0
    offload_to_eco: bool = True
    agent_params: AgentParams = field(default_factory=AgentParams)
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.betas:
            raise ConfigError("betas: must be non-empty")
        if any(b < 0 for b in self.betas):
            raise ConfigError("betas: values must be >= 0")
        if not self.seeds:
            raise ConfigError("seeds: must be non-empty")
        if self.window < 1:
            raise ConfigError("window: must be >= 1")
        if self.J < 1:
            raise ConfigError("J: must be >= 1")
        if not self.sadi_minutes > 0:
            raise ConfigError("sadi_minutes: must be > 0")
        if not self.reward_energy_scale > 0:
            raise ConfigError("reward_energy_scale: must be > 0")
        unknown = [a for a in self.agents if a not in AGENT_NAMES]
        if unknown:
            raise ConfigError(f"agents: unknown agent(s) {unknown}; expected {list(AGENT_NAMES)}")
        if not 0 <= self.agent_params.epsilon <= 1:
            raise ConfigError("agent_params.epsilon: must lie in [0, 1]")
        if self.agent_params.context not in ("arm_slot", "one_hot"):
            raise ConfigError("agent_params.context: must be 'arm_slot' or 'one_hot'")
        try:
            self.profile.validate()
        except TraceError as exc:
            raise ConfigError(f"trace: {exc}") from None

    @property
    def slices(self) -> tuple[SliceSpec, ...]:
        return self.profile.specs()


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    names = {f.name for f in fields(cls)}
    extra = set(data) - names
    if extra:
        raise ConfigError(f"{where}.{sorted(extra)[0]}: unknown key")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from None


def _profile_from(data: dict) -> SyntheticProfile:
    data = dict(data)
    slices = data.pop("slices", None)
    if slices is None:
        base = default_profile()
        slices_t = base.slices
    else:
        if not slices:
            raise ConfigError("trace.slices: must be non-empty")
        slices_t = []
        for i, s in enumerate(slices):
            s = dict(s)
            for key in ("users", "delay_range"):
                if key in s:
                    s[key] = tuple(s[key])
            slices_t.append(_build(SliceProfile, s, f"trace.slices[{i}]"))
    data.pop("source", None)
    data.pop("csv", None)
    return _build(SyntheticProfile, {**data, "slices": tuple(slices_t)}, "trace")


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data or {})
    kw = {}
    trace = data.pop("trace", {}) or {}
    kw["profile"] = _profile_from(trace)
    if trace.get("source", "synthetic") == "csv":
        if not trace.get("csv"):
            raise ConfigError("trace.csv: required when trace.source is 'csv'")
        kw["trace_csv"] = str(trace["csv"])
    elif trace.get("source", "synthetic") != "synthetic":
        raise ConfigError("trace.source: must be 'synthetic' or 'csv'")
    if "power" in data:
        kw["power"] = _build(PowerParams, data.pop("power"), "power")
    if "agent_params" in data:
        ap = dict(data.pop("agent_params"))
        if "hidden" in ap:
            ap["hidden"] = tuple(ap["hidden"])
        kw["agent_params"] = _build(AgentParams, ap, "agent_params")
    for key in ("betas", "seeds", "agents"):
        if key in data and not isinstance(data[key], list):
            data[key] = [data[key]]
    kw.update(data)
    return _build(ExperimentConfig, kw, "config")


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    cfg = config_from_dict(data)
    if cfg.trace_csv and not Path(cfg.trace_csv).is_absolute():
        cfg.trace_csv = str((Path(path).parent / cfg.trace_csv).resolve())
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    prof = cfg.profile
    trace = {
        "source": "csv" if cfg.trace_csv else "synthetic",
        "sadi_count": prof.sadi_count,
        "sadis_per_day": prof.sadis_per_day,
        "eco_load_fraction": prof.eco_load_fraction,
        "slices": [
            {**asdict(s), "users": list(s.users), "delay_range": list(s.delay_range)}
            for s in prof.slices
        ],
    }
    if cfg.trace_csv:
        trace["csv"] = cfg.trace_csv
    ap = asdict(cfg.agent_params)
    ap["hidden"] = list(ap["hidden"])
    return {
        "trace": trace,
        "agents": list(cfg.agents),
        "betas": list(cfg.betas),
        "seeds": list(cfg.seeds),
        "J": cfg.J,
        "sadi_minutes": cfg.sadi_minutes,
        "window": cfg.window,
        "output_dir": cfg.output_dir,
        "eco_ablation": cfg.eco_ablation,
        "power": asdict(cfg.power),
        "reward_energy_scale": cfg.reward_energy_scale,
        "offload_to_eco": cfg.offload_to_eco,
        "agent_params": ap,
        "workers": cfg.workers,
    }


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)
