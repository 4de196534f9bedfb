"""Base-station power model with per-slice fixed and load-dependent terms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .traffic import SliceSpec


@dataclass(frozen=True)
class PowerParams:
    p_static: float = 18.0
    p_fixed: float = 139.0
    p_dynamic: float = 742.0

    def __post_init__(self):
        for name in ("p_static", "p_fixed", "p_dynamic"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class Configuration:
    """Activation bit per slice, indexed by ``slice_id``."""

    active: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "active", tuple(bool(a) for a in self.active))

    def as_array(self) -> np.ndarray:
        return np.array(self.active, dtype=bool)

    def label(self) -> str:
        return "".join("1" if a else "0" for a in self.active)


def slice_energy(spec: SliceSpec, rho: float, params: PowerParams) -> float:
    """Power drawn by one active slice carrying a fraction ``rho`` of the load."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"load portion must lie in [0, 1], got {rho}")
    return rho * spec.psi * params.p_dynamic + spec.psi * params.p_fixed


def base_station_power(
    config: Configuration,
    specs: Sequence[SliceSpec],
    rho: Sequence[float],
    params: PowerParams,
) -> float:
    if len(config.active) != len(specs) or len(rho) != len(specs):
        raise ValueError("configuration, specs and rho must be aligned by slice_id")
    for s in specs:
        if s.is_eco and not config.active[s.slice_id]:
            raise ValueError("the EcoSlice cannot be deactivated")
    total = params.p_static
    for s, on, r in zip(specs, config.active, rho):
        if on:
            total += slice_energy(s, float(r), params)
    return total


def power_table(active: np.ndarray, psi: np.ndarray, rho: np.ndarray, params: PowerParams) -> np.ndarray:
    """Vectorised power for many configurations at once.

    ``active`` and ``rho`` are ``(K, n)``; returns ``(K,)`` Watts.
    """
    per_slice = psi * (rho * params.p_dynamic + params.p_fixed)
    return (active * per_slice).sum(axis=1) + params.p_static
