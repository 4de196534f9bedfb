# %% [markdown]
# # Bandit agents on a short trace
#
# Trains every agent for 300 SADIs on a two-day trace and compares energy,
# QoS and regret over the evaluation replay.

# %%
from ecoslice.config import ExperimentConfig
from ecoslice.harness import rolling_mean, run_experiment
from ecoslice.traffic import SyntheticProfile, default_profile

cfg = ExperimentConfig(
    profile=SyntheticProfile(default_profile().slices, sadi_count=288),
    betas=[1.0],
    J=300,
)
summaries, results = run_experiment(cfg, write=False)

# %%
print(f"{'agent':<12} {'power W':>8} {'QoS':>6} {'gain':>6} {'regret':>8}")
for s in summaries:
    print(f"{s.agent:<12} {s.mean_power_watts:8.1f} {s.mean_qos:6.3f} "
          f"{s.energy_gain_vs_allactive:6.3f} {s.cumulative_regret:8.3f}")

# %%
# Smoothed training reward: how fast each learner settles
for r in results:
    curve = rolling_mean([o.reward for o in r.train], 50)
    print(f"{r.summary.agent:<12}", " ".join(f"{v:.4f}" for v in curve[::60]))
