"""Per-base-station slice activation bandit.

Arms are activation configurations; each step scores every arm so the regret
against the best arm of that SADI is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .energy import Configuration, PowerParams, power_table
from .qos import aggregate, served_delay
from .traffic import SliceSpec, TrafficTrace, validate_slices


@dataclass(frozen=True)
class EnvConfig:
    beta: float = 1.0
    power: PowerParams = field(default_factory=PowerParams)
    reward_energy_scale: float = 1.0
    offload_to_eco: bool = True
    # False: users of a deactivated slice get no service (EcoSlice ablation)
    eco_fallback: bool = True

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.reward_energy_scale > 0:
            raise ValueError("reward_energy_scale must be > 0")


@dataclass(frozen=True)
class Observation:
    sadi_of_day: int
    prev_power_watts: float
    prev_qos: float


@dataclass(frozen=True)
class StepOutcome:
    tau: int
    action: int
    config: Configuration
    power_watts: float
    qos: float
    reward: float
    best_reward: float
    regret_step: float
    all_rewards: np.ndarray = field(repr=False, compare=False)


def action_space(slices: Sequence[SliceSpec]) -> list[Configuration]:
    """All on/off patterns of the non-eco slices, EcoSlice always on.

    Index bit ``j`` switches the ``j``-th non-eco slice (in ``slice_id``
    order), so index 0 is EcoSlice-only and the last index is all-active.
    """
    eco = validate_slices(slices)
    others = [s.slice_id for s in slices if s.slice_id != eco]
    configs = []
    for idx in range(2 ** len(others)):
        active = [False] * len(slices)
        active[eco] = True
        for bit, sid in enumerate(others):
            active[sid] = bool((idx >> bit) & 1)
        configs.append(Configuration(tuple(active)))
    return configs


def all_active_index(slices: Sequence[SliceSpec]) -> int:
    return 2 ** (len(slices) - 1) - 1


def evaluate_arms(trace: TrafficTrace, tau: int, cfg: EnvConfig,
                  configs: Sequence[Configuration] | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(power, qos, reward)`` arrays over every configuration at SADI ``tau``."""
    configs = configs if configs is not None else action_space(trace.slices)
    active = np.array([c.active for c in configs], dtype=bool)
    eco = trace.eco_id
    loads = np.broadcast_to(trace.loads[tau], active.shape) * active
    if cfg.offload_to_eco:
        dropped = (trace.loads[tau] * ~active).sum(axis=1)
        loads = loads.copy()
        loads[:, eco] += dropped
    rho = loads / loads.sum(axis=1, keepdims=True)
    psi = np.array([s.psi for s in trace.slices])
    power = power_table(active, psi, rho, cfg.power)

    sid, dreq, _ = trace.users_at(tau)
    delta = np.array([s.delta_ms for s in trace.slices])
    qos = np.empty(len(configs))
    for k in range(len(configs)):
        served = served_delay(delta, active[k], eco, sid, cfg.eco_fallback)
        _, qos[k] = aggregate((served <= dreq).astype(float), sid, trace.n_slices)
    reward = cfg.reward_energy_scale / power + cfg.beta * qos
    return power, qos, reward


class SliceEnv:
    """Deterministic environment for one base station; caches per-SADI arm tables."""

    def __init__(self, trace: TrafficTrace, cfg: EnvConfig):
        self.trace = trace
        self.cfg = cfg
        self.configs = action_space(trace.slices)
        self._cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    @property
    def n_actions(self) -> int:
        return len(self.configs)

    def arms(self, tau: int):
        if tau not in self._cache:
            self._cache[tau] = evaluate_arms(self.trace, tau, self.cfg, self.configs)
        return self._cache[tau]

    def step(self, tau: int, action_index: int) -> StepOutcome:
        if not 0 <= action_index < len(self.configs):
            raise IndexError(f"action {action_index} out of range [0, {len(self.configs)})")
        power, qos, reward = self.arms(tau)
        best = float(reward.max())
        r = float(reward[action_index])
        return StepOutcome(
            tau=tau,
            action=action_index,
            config=self.configs[action_index],
            power_watts=float(power[action_index]),
            qos=float(qos[action_index]),
            reward=r,
            best_reward=best,
            regret_step=best - r,
            all_rewards=reward.copy(),
        )


def step(trace: TrafficTrace, tau: int, action_index: int, cfg: EnvConfig) -> StepOutcome:
    return SliceEnv(trace, cfg).step(tau, action_index)


def cumulative_regret(outcomes: Iterable[StepOutcome]) -> float:
    return float(sum(o.regret_step for o in outcomes))
