"""Deterministic multi-agent simulator of multi-link Wi-Fi BSSs.

Per-AP agents pick which of the k shared links to activate each iteration
(fixed, random, local bandit, or federated bandit policies); the simulator
computes interference-aware Shannon rates and aggregates max-min
throughput statistics across Monte Carlo batches of sampled worlds.
"""

from .agents import (
    ActionSpace,
    AgentState,
    RewardTable,
    Strategy,
    enumerate_actions,
    exploration_rate,
    global_reward,
    local_reward,
    select_action,
    update,
)
from .engine import IterationRecord, RunResult, min_rate_timeseries, run_scenario
from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    EmptyInputError,
    GeometryError,
    MlosimError,
)
from .harness import (
    BatchSummary,
    ExperimentConfig,
    StrategyStats,
    compute_ecdf,
    density_sweep,
    percentile,
    run_batch,
    run_experiment,
    run_single_scenario,
)
from .radio import (
    ActivationProfile,
    LinkSet,
    achieved_rate_bps,
    dbm_to_mw,
    interference_mw,
    mw_to_dbm,
    pathloss_db,
    received_power_dbm,
)
from .scenario import PhysicalConfig, Scenario, neighbors_of, sample_scenario

__version__ = "0.1.0"

__all__ = [
    "ActionSpace",
    "ActivationProfile",
    "AgentState",
    "BatchSummary",
    "ConfigError",
    "ContractError",
    "DomainError",
    "EmptyInputError",
    "ExperimentConfig",
    "GeometryError",
    "IterationRecord",
    "LinkSet",
    "MlosimError",
    "PhysicalConfig",
    "RewardTable",
    "RunResult",
    "Scenario",
    "Strategy",
    "StrategyStats",
    "achieved_rate_bps",
    "compute_ecdf",
    "dbm_to_mw",
    "density_sweep",
    "enumerate_actions",
    "exploration_rate",
    "global_reward",
    "interference_mw",
    "local_reward",
    "min_rate_timeseries",
    "mw_to_dbm",
    "neighbors_of",
    "pathloss_db",
    "percentile",
    "received_power_dbm",
    "run_batch",
    "run_experiment",
    "run_scenario",
    "run_single_scenario",
    "sample_scenario",
    "select_action",
    "update",
]
