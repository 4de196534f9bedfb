# %% [markdown]
# # What the EcoSlice buys
#
# Without the EcoSlice, switching a slice off leaves its users unserved, so
# the agent has to keep everything on. With it, Facebook and Google users ride
# the EcoSlice at no QoS cost.

# %%
from ecoslice.config import ExperimentConfig
from ecoslice.harness import eco_ablation
from ecoslice.traffic import SyntheticProfile, default_profile

cfg = ExperimentConfig(
    profile=SyntheticProfile(default_profile().slices, sadi_count=144),
    agents=["Thompson-C"],
    betas=[1.0, 5.0],
    J=300,
)
for with_eco, without in eco_ablation(cfg, write=False):
    print(f"beta={with_eco.beta:g}")
    for s in (with_eco, without):
        print(f"  {s.variant:<7} power {s.mean_power_watts:7.1f} W  QoS {s.mean_qos:.3f}  "
              f"reward {s.cumulative_reward:9.2f}  gain {s.energy_gain_vs_allactive:.3f}")
