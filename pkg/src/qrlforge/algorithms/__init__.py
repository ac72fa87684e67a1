"""Training algorithms: REINFORCE, DQN, PPO."""

from .common import (
    ReplayBuffer,
    Trajectory,
    Transition,
    discounted_returns,
    epsilon,
    gae,
    masked_argmax,
    masked_logits,
)
from .dqn import dqn_targets, dqn_update
from .ppo import Rollout, clipped_objective, ppo_update
from .reinforce import reinforce_update
from .train import TrialSummary, derive_rng, evaluate_greedy, train

__all__ = [
    "ReplayBuffer",
    "Trajectory",
    "Transition",
    "discounted_returns",
    "epsilon",
    "gae",
    "masked_argmax",
    "masked_logits",
    "dqn_targets",
    "dqn_update",
    "Rollout",
    "clipped_objective",
    "ppo_update",
    "reinforce_update",
    "TrialSummary",
    "derive_rng",
    "evaluate_greedy",
    "train",
]
