"""Link-activation policies: fixed, random, local bandit, federated bandit.

The learning strategies are epsilon-greedy multi-armed bandits over the
2**k - 1 nonempty link subsets, with epsilon = 1/sqrt(t). The local model
scores arms by the AP's own average achieved rate; the federated model
scores them by the average of the minimum instant rate seen across the
AP's neighborhood (itself included by default), which pushes the joint
behavior toward max-min fair activations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ContractError
from .radio import LinkSet
from .scenario import MAX_LINKS


class Strategy(Enum):
    FIXED = "fixed"
    RANDOM = "random"
    LOCAL_RL = "rl"
    FEDERATED_RL = "frl"

    @classmethod
    def from_name(cls, name: str) -> "Strategy":
        for s in cls:
            if s.value == name:
                return s
        raise ConfigError(f"unknown strategy {name!r}; expected one of "
                          f"{[s.value for s in cls]}")


@dataclass(frozen=True)
class ActionSpace:
    """All nonempty link subsets in ascending mask order (1 .. 2**k - 1)."""

    k: int
    actions: tuple[LinkSet, ...]

    @property
    def p(self) -> int:
        return len(self.actions)

    @property
    def full_index(self) -> int:
        return self.p - 1  # ascending order puts the all-links mask last

    def index_of(self, action: LinkSet) -> int:
        return action.mask - 1

    def mask_matrix(self) -> np.ndarray:
        """(p, k) boolean matrix: row a is the bit pattern of action a."""
        masks = np.arange(1, self.p + 1, dtype=np.uint32)
        return (masks[:, None] >> np.arange(self.k)) & 1 > 0


@lru_cache(maxsize=None)
def enumerate_actions(k: int) -> ActionSpace:
    """Deterministic enumeration of the 2**k - 1 nonempty link subsets."""
    if not 1 <= k <= MAX_LINKS:
        raise ConfigError(f"num_links must be in [1, {MAX_LINKS}], got {k}")
    return ActionSpace(k=k, actions=tuple(LinkSet(m, k) for m in range(1, 2**k)))


def exploration_rate(t: int) -> float:
    """Slow-decaying exploration probability, 1/sqrt(t) for t >= 1."""
    if t < 1:
        raise ConfigError(f"iteration index starts at 1, got {t}")
    return 1.0 / math.sqrt(t)


class RewardTable:
    """Per-action visit counts and running mean rewards (bits/second).

    The incremental update keeps each mean exactly equal to the arithmetic
    mean of all rewards credited to that action.
    """

    __slots__ = ("counts", "means")

    def __init__(self, num_actions: int):
        if num_actions < 1:
            raise ConfigError(f"need at least one action, got {num_actions}")
        self.counts = np.zeros(num_actions, dtype=np.int64)
        self.means = np.zeros(num_actions, dtype=np.float64)

    @property
    def num_actions(self) -> int:
        return len(self.counts)

    def credit(self, action_index: int, reward: float) -> None:
        self.counts[action_index] += 1
        self.means[action_index] += (reward - self.means[action_index]) / self.counts[action_index]

    def to_json_dict(self, space: ActionSpace) -> dict:
        """Mask-keyed view of the learned statistics, e.g. {"0101": {...}}."""
        return {
            str(space.actions[a]): {"count": int(self.counts[a]), "mean": float(self.means[a])}
            for a in range(self.num_actions)
        }


@dataclass
class AgentState:
    """One AP's policy state: strategy, reward tables, private RNG."""

    ap_index: int
    strategy: Strategy
    rng: np.random.Generator
    local_table: RewardTable
    global_table: RewardTable | None = None
    last_action: LinkSet | None = None
    last_action_index: int | None = None

    @classmethod
    def create(
        cls, ap_index: int, strategy: Strategy, num_actions: int, rng: np.random.Generator
    ) -> "AgentState":
        return cls(
            ap_index=ap_index,
            strategy=strategy,
            rng=rng,
            local_table=RewardTable(num_actions),
            global_table=(
                RewardTable(num_actions) if strategy is Strategy.FEDERATED_RL else None
            ),
        )


def _argmax_random_tie(values: np.ndarray, rng: np.random.Generator) -> int:
    best = np.flatnonzero(values == values.max())
    if len(best) == 1:
        return int(best[0])
    return int(best[rng.integers(len(best))])


def select_action(agent: AgentState, space: ActionSpace, t: int) -> LinkSet:
    """Pick this iteration's link subset and record it as the last action."""
    strat = agent.strategy
    if strat is Strategy.FIXED:
        index = space.full_index
    elif strat is Strategy.RANDOM:
        index = int(agent.rng.integers(space.p))
    else:
        table = agent.global_table if strat is Strategy.FEDERATED_RL else agent.local_table
        if agent.rng.random() < exploration_rate(t):
            index = int(agent.rng.integers(space.p))
        else:
            index = _argmax_random_tie(table.means, agent.rng)
    action = space.actions[index]
    agent.last_action = action
    agent.last_action_index = index
    return action


def local_reward(rate_bps: float) -> float:
    """Instant reward is the achieved rate itself, unnormalized."""
    return rate_bps


def global_reward(
    own_instant: float, neighbor_instants, include_self: bool = True
) -> float:
    """Minimum instant reward across the sharing neighborhood.

    With no neighbors (and self included) this degrades to the local
    reward, so isolated APs behave like the purely local learner.
    """
    values = list(neighbor_instants)
    if include_self:
        values.append(own_instant)
    if not values:
        return own_instant
    return min(values)


def update(
    agent: AgentState,
    action: LinkSet,
    local_r: float,
    global_r: float | None = None,
) -> AgentState:
    """Credit the iteration's rewards to the agent's tables.

    Every strategy records local statistics (fixed/random only for
    reporting); the federated strategy additionally credits the shared
    minimum to its global table.
    """
    if action != agent.last_action:
        raise ContractError(
            f"update for action {action} but agent {agent.ap_index} last selected "
            f"{agent.last_action}"
        )
    agent.local_table.credit(agent.last_action_index, local_r)
    if agent.strategy is Strategy.FEDERATED_RL:
        if global_r is None:
            raise ContractError("federated agents require a global reward each update")
        agent.global_table.credit(agent.last_action_index, global_r)
    return agent
