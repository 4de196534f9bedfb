"""Experiment runner and metrics.

Each grid cell (agent, beta, seed) trains an agent online for ``J`` SADIs,
consuming the trace cyclically, then replays the full horizon greedily while
still learning. Summaries describe the replay; the training steps are logged
separately for learning curves.
"""
from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .agents import AGENT_NAMES, arm_slot_contexts, make_agent, one_hot_contexts
from .config import ExperimentConfig
from .env import EnvConfig, Observation, SliceEnv, StepOutcome, all_active_index
from .traffic import TrafficTrace, generate_synthetic, ingest_csv

log = logging.getLogger(__name__)

STEP_COLUMNS = ["tau", "action", "power_watts", "qos", "reward", "best_reward", "regret"]


@dataclass
class RunSummary:
    agent: str
    beta: float
    seed: int
    mean_power_watts: float
    total_energy_wh: float
    mean_qos: float
    cumulative_reward: float
    cumulative_regret: float
    best_reward_sum: float
    energy_gain_vs_allactive: float = float("nan")
    wall_time_select_s: float = 0.0
    wall_time_update_s: float = 0.0
    variant: str = "eco"


@dataclass
class CellResult:
    summary: RunSummary
    train: list[StepOutcome]
    steps: list[StepOutcome]
    losses: list[tuple[str, int, float]] = field(default_factory=list)


def rolling_mean(series, window: int) -> np.ndarray:
    """Trailing mean over at most ``window`` points; output has the input's length."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        return x.copy()
    c = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


def load_trace(cfg: ExperimentConfig, seed: int) -> TrafficTrace:
    if cfg.trace_csv:
        return ingest_csv(cfg.trace_csv, cfg.slices, cfg.profile.sadis_per_day)
    return generate_synthetic(seed, cfg.profile)


def env_config(cfg: ExperimentConfig, beta: float, variant: str = "eco") -> EnvConfig:
    eco = variant == "eco"
    return EnvConfig(
        beta=beta,
        power=cfg.power,
        reward_energy_scale=cfg.reward_energy_scale,
        offload_to_eco=cfg.offload_to_eco and eco,
        eco_fallback=eco,
    )


def agent_seed(seed: int, agent: str) -> int:
    # independent of beta, so cells that differ only in beta share random numbers
    return int(np.random.SeedSequence([seed, AGENT_NAMES.index(agent)]).generate_state(1)[0])


def build_agent(name: str, env: SliceEnv, cfg: ExperimentConfig, seed: int):
    ap = cfg.agent_params
    N = env.trace.sadis_per_day
    params = dict(epsilon=ap.epsilon, alpha=ap.alpha, hidden=ap.hidden, M=ap.M, phi=ap.phi,
                  J=cfg.J, literal_update=ap.literal_update, prior_var=ap.prior_var)
    if ap.optimistic_init:
        # upper bound of the reward: QoS 1 at the lowest conceivable power
        params["init_output"] = env.cfg.reward_energy_scale / env.cfg.power.p_static + env.cfg.beta
    if name == "Thompson-C":
        params["contexts"] = (one_hot_contexts(env.n_actions, N) if ap.context == "one_hot"
                              else arm_slot_contexts(env.n_actions, N, ap.arm_scale, ap.slot_scale))
    return make_agent(name, env.n_actions, N, seed=agent_seed(seed, name), **params)


def run_cell(trace: TrafficTrace, agent_name: str, beta: float, seed: int, cfg: ExperimentConfig,
             variant: str = "eco") -> CellResult:
    env = SliceEnv(trace, env_config(cfg, beta, variant))
    agent = build_agent(agent_name, env, cfg, seed)
    N, T = trace.sadis_per_day, trace.sadi_count
    # the status quo before the agent takes over: everything on
    start = env.step(0, all_active_index(trace.slices))
    prev_p, prev_q = start.power_watts, start.qos
    t_sel = t_upd = 0.0
    n_calls = 0
    losses = []

    def play(tau, phase, it):
        nonlocal prev_p, prev_q, t_sel, t_upd, n_calls
        obs = Observation(tau % N, prev_p, prev_q)
        t0 = time.perf_counter()
        a = agent.select(obs)
        t1 = time.perf_counter()
        out = env.step(tau, a)
        t2 = time.perf_counter()
        loss = agent.update(obs, a, out.reward)
        t3 = time.perf_counter()
        t_sel += t1 - t0
        t_upd += t3 - t2
        n_calls += 1
        if loss is not None:
            losses.append((phase, it, loss))
        prev_p, prev_q = out.power_watts, out.qos
        return out

    train = [play(j % T, "train", j) for j in range(cfg.J)]
    agent.freeze()
    steps = [play(tau, "eval", tau) for tau in range(T)]

    power = np.array([o.power_watts for o in steps])
    summary = RunSummary(
        agent=agent_name,
        beta=beta,
        seed=seed,
        mean_power_watts=float(power.mean()),
        total_energy_wh=float(power.sum() * cfg.sadi_minutes / 60.0),
        mean_qos=float(np.mean([o.qos for o in steps])),
        cumulative_reward=float(sum(o.reward for o in steps)),
        cumulative_regret=float(sum(o.regret_step for o in steps)),
        best_reward_sum=float(sum(o.best_reward for o in steps)),
        wall_time_select_s=t_sel * 1000.0 / n_calls,
        wall_time_update_s=t_upd * 1000.0 / n_calls,
        variant=variant,
    )
    return CellResult(summary, train, steps, losses)


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def cell_tag(agent: str, beta: float, seed: int, variant: str = "eco") -> str:
    tag = f"{agent}_{beta:g}_{seed}"
    return tag if variant == "eco" else f"{tag}_{variant}"


def write_steps(path, outcomes) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STEP_COLUMNS)
        for o in outcomes:
            w.writerow([o.tau, o.action, _fmt(o.power_watts), _fmt(o.qos), _fmt(o.reward),
                        _fmt(o.best_reward), _fmt(o.regret_step)])


def read_steps(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in STEP_COLUMNS}


def write_losses(path, losses) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phase", "iteration", "loss"])
        for phase, it, loss in losses:
            w.writerow([phase, it, _fmt(loss)])


def write_summaries(path, summaries) -> None:
    cols = [f.name for f in fields(RunSummary)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for s in summaries:
            w.writerow([_fmt(getattr(s, c)) for c in cols])


def read_summaries(path) -> list[RunSummary]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for f in fields(RunSummary):
                v = row[f.name]
                kw[f.name] = v if f.type in ("str",) else (int(v) if f.type == "int" else float(v))
            out.append(RunSummary(**kw))
    return out


def write_cell(out_dir: Path, res: CellResult) -> None:
    s = res.summary
    tag = cell_tag(s.agent, s.beta, s.seed, s.variant)
    write_steps(out_dir / f"steps_{tag}.csv", res.steps)
    write_steps(out_dir / f"train_{tag}.csv", res.train)
    if res.losses:
        write_losses(out_dir / f"loss_{tag}.csv", res.losses)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def _run_one(args):
    cfg, agent, beta, seed, variant = args
    return run_cell(load_trace(cfg, seed), agent, beta, seed, cfg, variant)


def _run_grid(cfg: ExperimentConfig, cells) -> list[CellResult]:
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(_run_one, [(cfg, *c) for c in cells]))
    results, traces = [], {}
    for agent, beta, seed, variant in cells:
        if seed not in traces:
            traces = {seed: load_trace(cfg, seed)}
        log.info("running %s beta=%g seed=%d (%s)", agent, beta, seed, variant)
        results.append(run_cell(traces[seed], agent, beta, seed, cfg, variant))
    return results


def attach_gains(summaries: list[RunSummary]) -> None:
    """Fill ``energy_gain_vs_allactive`` from the AllActive row of the same (beta, seed)."""
    base = {(s.beta, s.seed): s.total_energy_wh for s in summaries
            if s.agent == "AllActive" and s.variant == "eco"}
    for s in summaries:
        ref = base.get((s.beta, s.seed))
        if ref is not None:
            s.energy_gain_vs_allactive = 0.0 if s.agent == "AllActive" and s.variant == "eco" \
                else 1.0 - s.total_energy_wh / ref


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> tuple[list[RunSummary], list[CellResult]]:
    """Run every (agent, beta, seed) cell; AllActive is always added as the baseline."""
    agents = list(dict.fromkeys([*cfg.agents, "AllActive"]))
    cells = [(a, b, s, "eco") for s in cfg.seeds for b in cfg.betas for a in agents]
    results = _run_grid(cfg, cells)
    summaries = [r.summary for r in results]
    attach_gains(summaries)
    if write:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            write_cell(out, r)
        write_summaries(out / "summary.csv", summaries)
    return summaries, results


def eco_ablation(cfg: ExperimentConfig, write: bool = True, agent: str = "Thompson-C"):
    """Run ``agent`` with and without the EcoSlice for every (beta, seed).

    Without the EcoSlice, traffic of a deactivated slice is dropped and its
    users count as unsatisfied. Returns ``[(with_eco, without_eco), ...]``.
    """
    cells = []
    for s in cfg.seeds:
        for b in cfg.betas:
            cells += [("AllActive", b, s, "eco"), (agent, b, s, "eco"), (agent, b, s, "no_eco")]
    results = _run_grid(cfg, cells)
    summaries = [r.summary for r in results]
    attach_gains(summaries)
    pairs = []
    for s in cfg.seeds:
        for b in cfg.betas:
            pick = {(r.variant, r.agent): r for r in summaries if r.seed == s and r.beta == b}
            pairs.append((pick[("eco", agent)], pick[("no_eco", agent)]))
    if write:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            if r.summary.agent == agent:
                write_cell(out, r)
        write_summaries(out / "ablation.csv", [x for p in pairs for x in p])
    return pairs


def report(out_dir, window: int = 50, sadi_minutes: float = 10.0) -> list[RunSummary]:
    """Rebuild summaries from ``steps_*.csv`` logs and write smoothed curves.

    Writes ``report.csv`` and, per cell, ``curves_<tag>.csv`` with rolling
    means of reward, regret, power and QoS (plus loss when a loss log exists).
    """
    out_dir = Path(out_dir)
    summaries = []
    for path in sorted(out_dir.glob("steps_*.csv")):
        tag = path.stem[len("steps_"):]
        parts = tag.split("_")
        variant = "eco"
        if parts[-1] == "eco" and parts[-2] == "no":
            variant, parts = "no_eco", parts[:-2]
        agent, beta, seed = "_".join(parts[:-2]), float(parts[-2]), int(parts[-1])
        d = read_steps(path)
        summaries.append(RunSummary(
            agent=agent, beta=beta, seed=seed,
            mean_power_watts=float(d["power_watts"].mean()),
            total_energy_wh=float(d["power_watts"].sum() * sadi_minutes / 60.0),
            mean_qos=float(d["qos"].mean()),
            cumulative_reward=float(d["reward"].sum()),
            cumulative_regret=float(d["regret"].sum()),
            best_reward_sum=float(d["best_reward"].sum()),
            variant=variant,
        ))
        curves = {c: rolling_mean(d[c], window) for c in ("reward", "regret", "power_watts", "qos")}
        curves["cumulative_regret"] = np.cumsum(d["regret"])
        loss_path = out_dir / f"loss_{tag}.csv"
        with open(out_dir / f"curves_{tag}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["tau", *curves])
            for i, tau in enumerate(d["tau"].astype(int)):
                w.writerow([tau, *(_fmt(v[i]) for v in curves.values())])
        if loss_path.exists():
            with open(loss_path, newline="", encoding="utf-8") as fh:
                rows = list(csv.DictReader(fh))
            loss = np.array([float(r["loss"]) for r in rows])
            with open(out_dir / f"loss_curve_{tag}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["phase", "iteration", "loss", "loss_smoothed"])
                for r, sm in zip(rows, rolling_mean(loss, window)):
                    w.writerow([r["phase"], r["iteration"], r["loss"], _fmt(sm)])
    attach_gains(summaries)
    write_summaries(out_dir / "report.csv", summaries)
    return summaries


def regret_identity_error(summary: RunSummary) -> float:
    """Relative mismatch of cumulative reward + regret against the best-reward sum."""
    lhs = summary.cumulative_reward + summary.cumulative_regret
    return abs(lhs - summary.best_reward_sum) / max(abs(summary.best_reward_sum), 1e-300)
