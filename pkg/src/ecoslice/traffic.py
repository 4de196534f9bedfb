"""Per-SADI slice traffic: synthetic diurnal generator, CSV ingestion and export.

A trace stores one row per user request (``sadi, slice, delay_req_ms, load``)
in flat numpy columns, plus a per-SADI background load that is not attributed
to any user. The EcoSlice carries its always-on floor load there.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class TraceError(ValueError):
    """Raised for invalid profiles, traces or trace files."""


@dataclass(frozen=True)
class SliceSpec:
    slice_id: int
    name: str
    psi: float
    delta_ms: float
    is_eco: bool = False

    def __post_init__(self):
        if not self.psi > 0:
            raise TraceError(f"slice {self.name!r}: psi must be > 0, got {self.psi}")
        if not self.delta_ms > 0:
            raise TraceError(f"slice {self.name!r}: delta_ms must be > 0, got {self.delta_ms}")


@dataclass(frozen=True)
class UserDemand:
    slice_id: int
    delay_req_ms: float
    load: float


def validate_slices(slices: Sequence[SliceSpec]) -> int:
    """Check slice-set invariants and return the EcoSlice index."""
    if not slices:
        raise TraceError("slice list is empty")
    for i, s in enumerate(slices):
        if s.slice_id != i:
            raise TraceError(f"slice ids must be 0..n-1 in order; got {s.slice_id} at position {i}")
    eco = [s.slice_id for s in slices if s.is_eco]
    if len(eco) != 1:
        raise TraceError(f"exactly one EcoSlice required, found {len(eco)}")
    eco_id = eco[0]
    min_psi = min(s.psi for s in slices)
    if slices[eco_id].psi > min_psi:
        raise TraceError("the EcoSlice must have the lowest psi of its base station")
    return eco_id


@dataclass(frozen=True, eq=False)
class TrafficTrace:
    """Immutable traffic for one base station over ``sadi_count`` SADIs.

    User rows are kept column-wise, sorted by ``(sadi, slice)``; ``background``
    is a ``(sadi_count, n_slices)`` array of load not owned by any user.
    """

    sadis_per_day: int
    slices: tuple[SliceSpec, ...]
    sadi: np.ndarray
    slice_id: np.ndarray
    delay_req_ms: np.ndarray
    load: np.ndarray
    background: np.ndarray
    sadi_count: int = field(init=False)
    loads: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        validate_slices(self.slices)
        n = len(self.slices)
        bg = np.asarray(self.background, dtype=float)
        if bg.ndim != 2 or bg.shape[1] != n:
            raise TraceError(f"background must have shape (sadi_count, {n})")
        sadi_count = bg.shape[0]
        if sadi_count <= 0 or self.sadis_per_day <= 0 or sadi_count % self.sadis_per_day:
            raise TraceError(
                f"sadi_count={sadi_count} must be a positive multiple of sadis_per_day={self.sadis_per_day}"
            )
        sadi = np.asarray(self.sadi, dtype=np.int64)
        sid = np.asarray(self.slice_id, dtype=np.int64)
        dreq = np.asarray(self.delay_req_ms, dtype=float)
        load = np.asarray(self.load, dtype=float)
        if not (len(sadi) == len(sid) == len(dreq) == len(load)):
            raise TraceError("user columns have different lengths")
        if len(sadi) and (sadi.min() < 0 or sadi.max() >= sadi_count):
            raise TraceError("user row references a SADI outside the trace")
        if len(sid) and (sid.min() < 0 or sid.max() >= n):
            raise TraceError("user row references an unknown slice")
        if np.any(~(dreq > 0)):
            raise TraceError("delay_req_ms must be > 0")
        if np.any(~(load >= 0)) or np.any(~(bg >= 0)):
            raise TraceError("loads must be >= 0")
        order = np.lexsort((sid, sadi))
        cols = {"sadi": sadi, "slice_id": sid, "delay_req_ms": dreq, "load": load}
        for name, col in cols.items():
            col = col[order]
            col.setflags(write=False)
            object.__setattr__(self, name, col)
        bg = bg.copy()
        loads = bg.copy()
        np.add.at(loads, (self.sadi, self.slice_id), self.load)
        if np.any(loads.sum(axis=1) <= 0):
            bad = int(np.flatnonzero(loads.sum(axis=1) <= 0)[0])
            raise TraceError(f"total base-station load is zero at SADI {bad}")
        bg.setflags(write=False)
        loads.setflags(write=False)
        object.__setattr__(self, "background", bg)
        object.__setattr__(self, "loads", loads)
        object.__setattr__(self, "sadi_count", sadi_count)
        # row offsets per SADI for O(1) slicing
        offsets = np.searchsorted(self.sadi, np.arange(sadi_count + 1))
        object.__setattr__(self, "_offsets", offsets)

    @property
    def n_slices(self) -> int:
        return len(self.slices)

    @property
    def eco_id(self) -> int:
        return next(s.slice_id for s in self.slices if s.is_eco)

    def users_at(self, tau: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(slice_id, delay_req_ms, load)`` arrays for the users of SADI ``tau``."""
        if not 0 <= tau < self.sadi_count:
            raise IndexError(f"SADI {tau} out of range [0, {self.sadi_count})")
        lo, hi = self._offsets[tau], self._offsets[tau + 1]
        return self.slice_id[lo:hi], self.delay_req_ms[lo:hi], self.load[lo:hi]

    @property
    def demands(self) -> list[list[list[UserDemand]]]:
        out = [[[] for _ in self.slices] for _ in range(self.sadi_count)]
        for t, s, d, l in zip(self.sadi, self.slice_id, self.delay_req_ms, self.load):
            out[int(t)][int(s)].append(UserDemand(int(s), float(d), float(l)))
        return out

    def __eq__(self, other):
        if not isinstance(other, TrafficTrace):
            return NotImplemented
        return (
            self.sadis_per_day == other.sadis_per_day
            and self.slices == other.slices
            and all(
                np.array_equal(getattr(self, c), getattr(other, c))
                for c in ("sadi", "slice_id", "delay_req_ms", "load", "background")
            )
        )

    __hash__ = None


def load_portion(trace: TrafficTrace, tau: int) -> np.ndarray:
    """Share of the base-station offered load carried by each slice at ``tau``."""
    if not 0 <= tau < trace.sadi_count:
        raise IndexError(f"SADI {tau} out of range [0, {trace.sadi_count})")
    return portions(trace.loads[tau])


def portions(loads) -> np.ndarray:
    loads = np.asarray(loads, dtype=float)
    total = loads.sum()
    if not total > 0:
        raise ValueError("total load must be positive")
    return loads / total


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceProfile:
    """Traffic and service description of one slice for the generator.

    The mean slice load over a day follows
    ``mean_load * (1 + amp1*sin(2*pi*x + phase) + amp2*sin(4*pi*x + 2*phase))``
    with ``x`` the fraction of the day elapsed. ``noise`` is a relative
    Gaussian perturbation of the slice total.
    """

    name: str
    psi: float
    delta_ms: float
    is_eco: bool = False
    users: tuple[int, int] = (11, 30)
    delay_range: tuple[float, float] = (10.0, 20.0)
    mean_load: float = 100.0
    amp1: float = 0.5
    amp2: float = 0.2
    phase: float = 0.0
    noise: float = 0.1

    def curve(self, sadis_per_day: int) -> np.ndarray:
        x = np.arange(sadis_per_day) / sadis_per_day
        shape = 1 + self.amp1 * np.sin(2 * np.pi * x + self.phase) + self.amp2 * np.sin(
            4 * np.pi * x + 2 * self.phase
        )
        return self.mean_load * shape


@dataclass(frozen=True)
class SyntheticProfile:
    slices: tuple[SliceProfile, ...]
    sadi_count: int = 1440
    sadis_per_day: int = 144
    eco_load_fraction: float = 0.05

    def specs(self) -> tuple[SliceSpec, ...]:
        return tuple(
            SliceSpec(i, s.name, s.psi, s.delta_ms, s.is_eco) for i, s in enumerate(self.slices)
        )

    def validate(self):
        if not self.slices:
            raise TraceError("profile has an empty slice list")
        validate_slices(self.specs())
        if self.sadis_per_day <= 0 or self.sadi_count <= 0 or self.sadi_count % self.sadis_per_day:
            raise TraceError("sadi_count must be a positive multiple of sadis_per_day")
        if not self.eco_load_fraction > 0:
            raise TraceError("eco_load_fraction must be > 0")
        for s in self.slices:
            if s.is_eco:
                continue
            lo, hi = s.users
            if lo < 1 or hi < lo:
                raise TraceError(f"slice {s.name!r}: invalid users range {s.users}")
            dlo, dhi = s.delay_range
            if not (0 < dlo <= dhi):
                raise TraceError(f"slice {s.name!r}: invalid delay range {s.delay_range}")
            if not s.mean_load > 0 or s.noise < 0:
                raise TraceError(f"slice {s.name!r}: mean_load must be > 0 and noise >= 0")


def default_profile() -> SyntheticProfile:
    """Facebook, YouTube and Google slices plus the EcoSlice, with the reference psi, delay and user ranges."""
    return SyntheticProfile(
        slices=(
            SliceProfile("Facebook", 1.2, 10.0, users=(11, 30), delay_range=(11.0, 20.0),
                         mean_load=120.0, amp1=0.6, amp2=0.25, phase=-2.0),
            SliceProfile("YouTube", 1.6, 1.0, users=(11, 30), delay_range=(6.0, 17.0),
                         mean_load=200.0, amp1=0.7, amp2=0.2, phase=-2.6),
            SliceProfile("Google", 1.4, 15.0, users=(11, 30), delay_range=(16.0, 25.0),
                         mean_load=80.0, amp1=0.5, amp2=0.3, phase=-1.4),
            SliceProfile("EcoSlice", 1.0, 11.0, is_eco=True),
        )
    )


def generate_synthetic(seed: int, profile: SyntheticProfile | None = None) -> TrafficTrace:
    """Sample a trace; a pure function of ``(seed, profile)``."""
    profile = profile or default_profile()
    profile.validate()
    rng = np.random.default_rng(seed)
    specs = profile.specs()
    N, T, n = profile.sadis_per_day, profile.sadi_count, len(specs)
    app = [i for i, s in enumerate(profile.slices) if not s.is_eco]
    eco_id = next(i for i, s in enumerate(profile.slices) if s.is_eco)

    background = np.zeros((T, n))
    eco_floor = profile.eco_load_fraction * np.mean([profile.slices[i].mean_load for i in app]) if app else 1.0
    background[:, eco_id] = eco_floor

    cols: dict[str, list[np.ndarray]] = {"sadi": [], "slice": [], "d": [], "l": []}
    curves = {i: profile.slices[i].curve(N) for i in app}
    for tau in range(T):
        for i in app:
            sp = profile.slices[i]
            k = int(rng.integers(sp.users[0], sp.users[1] + 1))
            d = rng.uniform(sp.delay_range[0], sp.delay_range[1], size=k)
            total = curves[i][tau % N] * (1.0 + sp.noise * rng.standard_normal()) if sp.noise else curves[i][tau % N]
            total = max(total, 0.0)
            share = rng.dirichlet(np.ones(k))
            cols["sadi"].append(np.full(k, tau))
            cols["slice"].append(np.full(k, i))
            cols["d"].append(d)
            cols["l"].append(share * total)

    cat = lambda xs, dt: np.concatenate(xs).astype(dt) if xs else np.zeros(0, dtype=dt)
    return TrafficTrace(
        sadis_per_day=N,
        slices=specs,
        sadi=cat(cols["sadi"], np.int64),
        slice_id=cat(cols["slice"], np.int64),
        delay_req_ms=cat(cols["d"], float),
        load=cat(cols["l"], float),
        background=background,
    )


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

CSV_HEADER = ["sadi", "slice", "user_id", "delay_req_ms", "load"]


def export_csv(trace: TrafficTrace, path) -> None:
    """Write the trace; background load rows have empty ``user_id`` and ``delay_req_ms``."""
    names = [s.name for s in trace.slices]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for tau in range(trace.sadi_count):
            sid, dreq, load = trace.users_at(tau)
            uid = 0
            for s, d, l in zip(sid, dreq, load):
                w.writerow([tau, names[s], uid, repr(float(d)), repr(float(l))])
                uid += 1
            for s in np.flatnonzero(trace.background[tau]):
                w.writerow([tau, names[s], "", "", repr(float(trace.background[tau, s]))])


def ingest_csv(path, slices: Sequence[SliceSpec], sadis_per_day: int | None = None) -> TrafficTrace:
    """Read a trace CSV; slice specs come from the sidecar config.

    ``sadis_per_day=None`` treats the whole file as a single day.
    """
    slices = tuple(slices)
    validate_slices(slices)
    by_name = {s.name: s.slice_id for s in slices}
    sadi, sid, dreq, load, bg_rows = [], [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise TraceError(f"{path}: line 1: expected header {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise TraceError(f"{path}: line {lineno}: expected 5 fields, got {len(row)}")
            try:
                t = int(row[0])
                name = row[1].strip()
                uid = row[2].strip()
                d = float(row[3]) if row[3].strip() else None
                l = float(row[4])
            except ValueError as exc:
                raise TraceError(f"{path}: line {lineno}: {exc}") from None
            if name not in by_name:
                raise TraceError(f"{path}: line {lineno}: unknown slice label {name!r}")
            if not math.isfinite(l) or l < 0:
                raise TraceError(f"{path}: line {lineno}: load must be finite and >= 0, got {l}")
            if t < 0:
                raise TraceError(f"{path}: line {lineno}: negative SADI index")
            if uid == "" and d is None:
                bg_rows.append((t, by_name[name], l))
                continue
            if uid == "" or d is None:
                raise TraceError(f"{path}: line {lineno}: user_id and delay_req_ms must both be set")
            if not d > 0:
                raise TraceError(f"{path}: line {lineno}: delay_req_ms must be > 0, got {d}")
            sadi.append(t)
            sid.append(by_name[name])
            dreq.append(d)
            load.append(l)
    seen = sorted(set(sadi) | {t for t, _, _ in bg_rows})
    if not seen:
        raise TraceError(f"{path}: no data rows")
    if seen != list(range(len(seen))):
        missing = next(i for i in range(len(seen) + 1) if i >= len(seen) or seen[i] != i)
        raise TraceError(f"{path}: SADIs must be contiguous from 0; SADI {missing} is missing")
    background = np.zeros((len(seen), len(slices)))
    for t, s, l in bg_rows:
        background[t, s] += l
    return TrafficTrace(
        sadis_per_day=sadis_per_day or len(seen),
        slices=slices,
        sadi=np.array(sadi, dtype=np.int64),
        slice_id=np.array(sid, dtype=np.int64),
        delay_req_ms=np.array(dreq, dtype=float),
        load=np.array(load, dtype=float),
        background=background,
    )
