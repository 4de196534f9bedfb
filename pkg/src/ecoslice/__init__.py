"""Energy-aware network slice activation with contextual bandits."""
from .agents import (AGENT_NAMES, AllActiveAgent, DcmabAgent, RandomAgent, ThompsonCAgent,
                     ThompsonNcAgent, make_agent)
from .config import ConfigError, ExperimentConfig, load_config, save_config
from .energy import Configuration, PowerParams, base_station_power, slice_energy
from .env import EnvConfig, Observation, SliceEnv, StepOutcome, action_space, cumulative_regret, step
from .harness import RunSummary, eco_ablation, report, rolling_mean, run_experiment
from .neural import MlpModel
from .qos import QosReport, evaluate_qos, user_satisfaction
from .traffic import (SliceSpec, TraceError, TrafficTrace, default_profile, export_csv,
                      generate_synthetic, ingest_csv, load_portion)

__version__ = "0.1.0"
