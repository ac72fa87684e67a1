"""Clipped-surrogate policy optimization with GAE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..agents import Agent
from ..nn import GroupedAdam
from .common import log_softmax, masked_logits


@dataclass
class Rollout:
    """Fixed-length batch of on-policy experience, possibly spanning episodes."""

    observations: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    masks: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray


def clipped_objective(ratio: np.ndarray, advantage: np.ndarray, clip: float) -> np.ndarray:
    """Per-sample surrogate min(ratio*A, clip(ratio, 1-c, 1+c)*A)."""
    return np.minimum(ratio * advantage, np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantage)


def ppo_sample_loss(
    logits: np.ndarray,
    value: float,
    action: int,
    old_log_prob: float,
    advantage: float,
    ret: float,
    mask: np.ndarray,
    clip: float,
    value_coef: float,
    entropy_coef: float,
) -> float:
    """Per-sample PPO loss as a plain function of raw logits and value; the
    independent reference the analytic gradients are tested against."""
    logp_all = log_softmax(masked_logits(logits, mask))
    ratio = float(np.exp(logp_all[action] - old_log_prob))
    pg = -clipped_objective(np.array([ratio]), np.array([advantage]), clip)[0]
    v_loss = 0.5 * (value - ret) ** 2
    probs = np.exp(logp_all)
    entropy = -float(np.sum(probs * logp_all))
    return float(pg + value_coef * v_loss - entropy_coef * entropy)


def ppo_gradients(
    values_new: np.ndarray,
    aux_new: np.ndarray,
    actions: np.ndarray,
    old_log_probs: np.ndarray,
    advantages: np.ndarray,
    returns: np.ndarray,
    masks: np.ndarray,
    clip: float,
    value_coef: float,
    entropy_coef: float,
) -> tuple[np.ndarray, np.ndarray, dict[str, float]]:
    """Analytic d(mean minibatch loss)/d logits and /d value, plus loss stats.

    The clipped term passes gradient through the ratio only where the
    unclipped branch is the active minimum.
    """
    m = len(actions)
    logp_all = log_softmax(masked_logits(values_new, masks))
    rows = np.arange(m)
    logp_new = logp_all[rows, actions]
    ratio = np.exp(logp_new - old_log_probs)
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantages
    pg_loss = -float(np.mean(np.minimum(unclipped, clipped)))
    v_err = aux_new - returns
    v_loss = 0.5 * float(np.mean(v_err**2))
    probs = np.exp(logp_all)
    entropy_per = -np.sum(probs * logp_all, axis=1)
    entropy = float(np.mean(entropy_per))

    active = unclipped <= clipped
    coef = np.where(active, -advantages * ratio, 0.0) / m
    onehot = np.zeros_like(probs)
    onehot[rows, actions] = 1.0
    g_logits = coef[:, None] * (onehot - probs)
    g_logits += entropy_coef / m * probs * (logp_all + entropy_per[:, None])
    g_aux = value_coef * v_err / m
    stats = {
        "policy_loss": pg_loss,
        "value_loss": v_loss,
        "entropy": entropy,
        "loss": pg_loss + value_coef * v_loss - entropy_coef * entropy,
    }
    return g_logits, g_aux, stats


def ppo_update(
    agent: Agent,
    optimizer: GroupedAdam,
    rollout: Rollout,
    update_rng: np.random.Generator,
    clip: float = 0.2,
    epochs: int = 4,
    minibatch_size: int = 32,
    value_coef: float = 0.5,
    entropy_coef: float = 0.01,
) -> dict[str, float]:
    """Several epochs of shuffled minibatch steps on one rollout.

    Advantages are normalized once per update (mean 0, std 1, eps 1e-8).
    Returns the mean policy/value/entropy losses across minibatches.
    """
    adv = rollout.advantages
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    n = len(rollout.actions)
    totals = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "loss": 0.0}
    n_batches = 0
    for _ in range(epochs):
        perm = update_rng.permutation(n)
        for start in range(0, n, minibatch_size):
            mb = perm[start : start + minibatch_size]
            values_new, aux_new = agent.forward_batch(rollout.observations[mb])
            if aux_new is None:
                raise ValueError("PPO needs an agent with a critic head")
            g_logits, g_aux, stats = ppo_gradients(
                values_new,
                aux_new,
                rollout.actions[mb],
                rollout.log_probs[mb],
                adv[mb],
                rollout.returns[mb],
                rollout.masks[mb],
                clip,
                value_coef,
                entropy_coef,
            )
            grad = agent.gradient_batch(rollout.observations[mb], g_logits, g_aux)
            agent.set_parameters(optimizer.step(agent.get_parameters(), grad))
            for key in totals:
                totals[key] += stats[key]
            n_batches += 1
    return {k: v / n_batches for k, v in totals.items()}
