"""Delay-based user satisfaction and its per-slice / per-station averages."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import Configuration
from .traffic import TrafficTrace


@dataclass(frozen=True, eq=False)
class QosReport:
    per_user: np.ndarray
    per_slice: np.ndarray
    station: float

    def __eq__(self, other):
        return (
            isinstance(other, QosReport)
            and np.array_equal(self.per_user, other.per_user)
            and np.array_equal(self.per_slice, other.per_slice, equal_nan=True)
            and self.station == other.station
        )

    __hash__ = None


def user_satisfaction(served_delta_ms: float, delay_req_ms: float) -> int:
    if not (served_delta_ms > 0 and delay_req_ms > 0):
        raise ValueError("delays must be positive")
    return int(served_delta_ms <= delay_req_ms)


def served_delay(delta: np.ndarray, active: np.ndarray, eco_id: int, slice_ids: np.ndarray,
                 eco_fallback: bool = True) -> np.ndarray:
    """Delay each user actually gets; ``inf`` when there is no fallback service."""
    on = active[slice_ids]
    fallback = delta[eco_id] if eco_fallback else np.inf
    return np.where(on, delta[slice_ids], fallback)


def aggregate(per_user: np.ndarray, slice_ids: np.ndarray, n_slices: int) -> tuple[np.ndarray, float]:
    """Per-slice means (NaN for empty slices) and their unweighted mean.

    Users stay attributed to the slice they requested, even when served by the
    EcoSlice, so empty slices are simply left out of the station average.
    """
    counts = np.bincount(slice_ids, minlength=n_slices)
    sums = np.bincount(slice_ids, weights=per_user, minlength=n_slices)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_slice = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    populated = counts > 0
    # no users at all: nobody is left unsatisfied
    station = float(per_slice[populated].mean()) if populated.any() else 1.0
    return per_slice, station


def evaluate_qos(trace: TrafficTrace, tau: int, config: Configuration, eco_fallback: bool = True) -> QosReport:
    """Satisfaction of every user at ``tau`` under ``config``.

    With ``eco_fallback=False`` users of deactivated slices get no service and
    count as unsatisfied.
    """
    active = config.as_array()
    eco = trace.eco_id
    if not active[eco]:
        raise ValueError("the EcoSlice cannot be deactivated")
    sid, dreq, _ = trace.users_at(tau)
    delta = np.array([s.delta_ms for s in trace.slices])
    served = served_delay(delta, active, eco, sid, eco_fallback)
    per_user = (served <= dreq).astype(np.int8)
    per_slice, station = aggregate(per_user.astype(float), sid, trace.n_slices)
    return QosReport(per_user=per_user, per_slice=per_slice, station=station)
