"""Policy-gradient update over complete episodes."""

from __future__ import annotations

import numpy as np

from ..agents import Agent
from ..nn import GroupedAdam
from .common import Trajectory, discounted_returns


def reinforce_update(
    agent: Agent,
    optimizer: GroupedAdam,
    trajectories: list[Trajectory],
    gamma: float,
    baseline: str = "mean",
) -> float:
    """Ascend sum_t log pi(a_t|s_t) * (G_t - b); returns the surrogate loss.

    With baseline="mean", b is the mean return over the whole batch; with
    baseline="none", b = 0.  One optimizer step over the accumulated gradient
    of all trajectories, normalized by the number of episodes.
    """
    if not trajectories:
        raise ValueError("need at least one trajectory")
    if baseline not in ("mean", "none"):
        raise ValueError(f"unknown baseline {baseline!r}")
    returns = [discounted_returns(traj.rewards, gamma) for traj in trajectories]
    b = float(np.mean(np.concatenate(returns))) if baseline == "mean" else 0.0
    n_eps = len(trajectories)
    grad = np.zeros(agent.n_parameters)
    loss = 0.0
    for traj, g_t in zip(trajectories, returns):
        traj.check()
        for t in range(len(traj)):
            advantage = float(g_t[t]) - b
            if advantage == 0.0:
                continue
            probs = traj.probs[t]
            gout = probs.copy()
            gout[traj.actions[t]] -= 1.0
            gout *= advantage / n_eps
            grad += agent.gradient(traj.observations[t], gout)
            loss += -traj.log_probs[t] * advantage / n_eps
    agent.set_parameters(optimizer.step(agent.get_parameters(), grad))
    return loss
