"""Deep Q-learning update with a frozen target network and Huber loss."""

from __future__ import annotations

import numpy as np

from ..agents import Agent
from ..nn import GroupedAdam
from .common import MASKED_LOGIT, Transition, huber, huber_grad


def dqn_targets(
    rewards: np.ndarray, terminated: np.ndarray, next_q_max: np.ndarray, gamma: float
) -> np.ndarray:
    """y = r + gamma * max_a Q_target(s', a), bootstrap cut at termination."""
    return rewards + gamma * next_q_max * (1.0 - terminated)


def dqn_update(
    agent: Agent,
    target_agent: Agent,
    optimizer: GroupedAdam,
    batch: list[Transition],
    gamma: float,
) -> float:
    """One Huber-loss step on the online agent only; returns the batch loss.

    Target-network evaluations run against the target agent's own execution
    counter, so the trial's logged cost per update is exactly
    batch_size * (1 forward + 2P gradient runs).
    """
    obs = np.stack([t.observation for t in batch])
    next_obs = np.stack([t.next_observation for t in batch])
    actions = np.array([t.action for t in batch])
    rewards = np.array([t.reward for t in batch], dtype=np.float64)
    terminated = np.array([t.terminated for t in batch], dtype=np.float64)

    q_values, _ = agent.forward_batch(obs)
    next_q, _ = target_agent.forward_batch(next_obs)
    for i, t in enumerate(batch):
        if t.next_mask is not None:
            next_q[i] = np.where(t.next_mask, next_q[i], MASKED_LOGIT)
    y = dqn_targets(rewards, terminated, next_q.max(axis=1), gamma)

    rows = np.arange(len(batch))
    delta = q_values[rows, actions] - y
    loss = float(np.mean(huber(delta)))

    gout = np.zeros_like(q_values)
    gout[rows, actions] = huber_grad(delta) / len(batch)
    grad = agent.gradient_batch(obs, gout)
    agent.set_parameters(optimizer.step(agent.get_parameters(), grad))
    return loss
