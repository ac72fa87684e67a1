"""The training loops, written once each and agnostic to the agent kind.

Construction (environment, agent, optimizer rates) happens outside or via
kind-independent calls; nothing in these loops branches on what the function
approximator is.  Execution accounting invariants kept by the DQN loop:

* action selection evaluates the agent once per environment step, also when
  the epsilon draw then overrides the action, so forwards-per-episode equals
  the episode length;
* updates run when global_step >= learning_starts and global_step is a
  multiple of train_frequency, each costing batch_size * (2P + 1) executions
  on the trial counter (target-network evaluations hit the target clone's
  private counter);
* greedy evaluation episodes run on a parameter-synced clone and are not
  logged as training records.

Together these make the logged circuit_executions recomputable from the
metrics file plus the config alone.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..agents import Agent, sync_parameters
from ..config import RunConfig, learning_rates_for, resolve_algorithm_params
from ..envs import make_env
from ..envs.base import Environment
from ..errors import ConfigError
from ..metrics import MetricRecord, MetricsSink
from ..nn import GroupedAdam
from .common import (
    ReplayBuffer,
    Trajectory,
    Transition,
    epsilon,
    gae,
    log_softmax,
    masked_argmax,
    masked_logits,
    sample_categorical,
)
from .dqn import dqn_update
from .ppo import Rollout, ppo_update
from .reinforce import reinforce_update

STREAM_ENV = 101
STREAM_AGENT = 211
STREAM_EXPLORE = 307
STREAM_BUFFER = 401
STREAM_UPDATE = 503
STREAM_EVAL = 601


def derive_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent substream of a trial seed (documented stream constants)."""
    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


@dataclass
class TrialSummary:
    episodes: int
    total_steps: int
    final_return_mean: float | None
    total_executions: int
    eval_return_mean: float | None


class _TrialState:
    """Per-episode bookkeeping shared by the three loops."""

    def __init__(self, config: RunConfig, params: dict, agent: Agent, sink: MetricsSink) -> None:
        self.agent = agent
        self.sink = sink
        self.params = params
        self.config = config
        self.t0 = time.perf_counter()
        self.episode = 0
        self.global_step = 0
        self.returns: list[float] = []
        self.losses_since_log: list[float] = []
        self.eval_return_mean: float | None = None
        self._eval_at_episode = -1
        self.stop = False
        total_timesteps, total_episodes = config.budget()
        self.total_timesteps = total_timesteps
        self.total_episodes = total_episodes
        self.eval_rng = derive_rng(config.seed, STREAM_EVAL)

    def budget_exhausted(self) -> bool:
        if self.stop:
            return True
        if self.total_episodes is not None and self.episode >= self.total_episodes:
            return True
        if self.total_timesteps is not None and self.global_step >= self.total_timesteps:
            return True
        return False

    def record_loss(self, loss: float | None) -> None:
        if loss is not None:
            self.losses_since_log.append(loss)

    def end_episode(self, ep_return: float, length: int, eps: float | None = None) -> None:
        loss = float(np.mean(self.losses_since_log)) if self.losses_since_log else None
        self.losses_since_log = []
        self.returns.append(ep_return)
        self.sink.log(
            MetricRecord(
                episode=self.episode,
                global_step=self.global_step,
                episodic_return=ep_return,
                length=length,
                loss=loss,
                epsilon=eps,
                circuit_executions=self.agent.execution_counter.count,
                wall_time_s=time.perf_counter() - self.t0,
            )
        )
        self.episode += 1
        self._episode_hooks()

    def _episode_hooks(self) -> None:
        early = self.params["early_stop_return"]
        if early is not None and len(self.returns) >= 20:
            if float(np.mean(self.returns[-20:])) >= early:
                self.stop = True
        interval = self.params["eval_interval_episodes"]
        if interval and self.episode % interval == 0:
            self.run_eval()

    def run_eval(self) -> None:
        self.eval_return_mean = evaluate_greedy(
            self.agent, self.config.env_id, self.params["eval_episodes"], self.eval_rng
        )
        self._eval_at_episode = self.episode
        threshold = self.params["eval_threshold"]
        if threshold is not None and self.eval_return_mean >= threshold:
            self.stop = True

    def summary(self) -> TrialSummary:
        final = float(np.mean(self.returns[-20:])) if self.returns else None
        if (
            self.params["eval_interval_episodes"]
            and self.returns
            and self._eval_at_episode != self.episode
        ):
            self.run_eval()
        return TrialSummary(
            episodes=self.episode,
            total_steps=self.global_step,
            final_return_mean=final,
            total_executions=self.agent.execution_counter.count,
            eval_return_mean=self.eval_return_mean,
        )


def evaluate_greedy(
    agent: Agent, env_id: str, n_episodes: int, eval_rng: np.random.Generator
) -> float:
    """Mean return of greedy episodes on a parameter-synced clone."""
    eval_agent = agent.clone()
    env = make_env(env_id)
    totals = []
    for _ in range(n_episodes):
        obs = env.reset(seed=int(eval_rng.integers(2**31)))
        total = 0.0
        done = False
        while not done:
            action = masked_argmax(eval_agent.forward(obs).values, env.action_mask())
            result = env.step(action)
            total += result.reward
            obs = result.observation
            done = result.terminated or result.truncated
        totals.append(total)
    return float(np.mean(totals))


def _sample_policy_action(
    agent: Agent, obs: np.ndarray, mask: np.ndarray, rng: np.random.Generator
) -> tuple[int, float, np.ndarray, float | None]:
    out = agent.forward(obs)
    logp_all = log_softmax(masked_logits(out.values, mask))
    probs = np.exp(logp_all)
    action = sample_categorical(rng, probs)
    return action, float(logp_all[action]), probs, out.auxiliary


def make_optimizer(config: RunConfig, params: dict, agent: Agent) -> GroupedAdam:
    rates, default_lr = learning_rates_for(config.agent_kind, params)
    return GroupedAdam(agent.n_parameters, agent.parameter_groups(), rates, default_lr)


def train(config: RunConfig, env: Environment, agent: Agent, sink: MetricsSink) -> TrialSummary:
    """Run the configured algorithm to its budget, logging one record per episode."""
    params = resolve_algorithm_params(config.algorithm, config.agent_kind, config.algorithm_params)
    _validate_combination(config, params, env)
    state = _TrialState(config, params, agent, sink)
    if state.budget_exhausted():
        return state.summary()
    if config.algorithm == "reinforce":
        _train_reinforce(config, params, env, agent, state)
    elif config.algorithm == "dqn":
        _train_dqn(config, params, env, agent, state)
    else:
        _train_ppo(config, params, env, agent, state)
    return state.summary()


def _validate_combination(config: RunConfig, params: dict, env: Environment) -> None:
    if env.descriptor.action_count < 2:
        raise ConfigError(f"{config.env_id} offers a single action; nothing to learn")
    if config.algorithm == "dqn":
        if params["exploration_total_steps"] is None and config.budget()[0] is None:
            raise ConfigError(
                "dqn with an episode budget needs algorithm_params.exploration_total_steps "
                "(the epsilon schedule is defined over steps)"
            )


def _env_seed(config: RunConfig) -> int:
    return int(derive_rng(config.seed, STREAM_ENV).integers(2**31))


def _train_reinforce(
    config: RunConfig, params: dict, env: Environment, agent: Agent, state: _TrialState
) -> None:
    optimizer = make_optimizer(config, params, agent)
    explore_rng = derive_rng(config.seed, STREAM_EXPLORE)
    gamma = params["gamma"]
    pending: list[Trajectory] = []
    obs = env.reset(seed=_env_seed(config))
    while not state.budget_exhausted():
        traj = Trajectory()
        ep_return = 0.0
        done = False
        while not done:
            mask = env.action_mask()
            action, logp, probs, _ = _sample_policy_action(agent, obs, mask, explore_rng)
            result = env.step(action)
            traj.observations.append(obs)
            traj.actions.append(action)
            traj.rewards.append(result.reward)
            traj.log_probs.append(logp)
            traj.probs.append(probs)
            ep_return += result.reward
            state.global_step += 1
            obs = result.observation
            done = result.terminated or result.truncated
        pending.append(traj)
        if len(pending) >= params["episodes_per_update"]:
            state.record_loss(reinforce_update(agent, optimizer, pending, gamma, params["baseline"]))
            pending = []
        state.end_episode(ep_return, len(traj))
        obs = env.reset()


def _train_dqn(
    config: RunConfig, params: dict, env: Environment, agent: Agent, state: _TrialState
) -> None:
    optimizer = make_optimizer(config, params, agent)
    explore_rng = derive_rng(config.seed, STREAM_EXPLORE)
    buffer_rng = derive_rng(config.seed, STREAM_BUFFER)
    target_agent = agent.clone()
    sync_parameters(agent, target_agent)
    buffer = ReplayBuffer(params["buffer_capacity"])
    exploration_total = params["exploration_total_steps"] or state.total_timesteps
    gamma = params["gamma"]
    obs = env.reset(seed=_env_seed(config))
    ep_return = 0.0
    length = 0
    eps = params["epsilon_start"]
    while not state.budget_exhausted():
        eps = epsilon(
            state.global_step,
            params["epsilon_start"],
            params["epsilon_end"],
            params["epsilon_decay_fraction"],
            exploration_total,
        )
        mask = env.action_mask()
        out = agent.forward(obs)  # evaluated every step; see module docstring
        if explore_rng.random() < eps:
            action = int(explore_rng.choice(np.flatnonzero(mask)))
        else:
            action = masked_argmax(out.values, mask)
        result = env.step(action)
        state.global_step += 1
        length += 1
        ep_return += result.reward
        next_mask = env.action_mask()
        buffer.push(
            Transition(obs, action, result.reward, result.observation, result.terminated, next_mask)
        )
        obs = result.observation
        if (
            state.global_step >= params["learning_starts"]
            and state.global_step % params["train_frequency"] == 0
        ):
            batch = buffer.sample(buffer_rng, params["batch_size"])
            if batch is not None:
                state.record_loss(dqn_update(agent, target_agent, optimizer, batch, gamma))
        if state.global_step % params["target_sync_interval"] == 0:
            sync_parameters(agent, target_agent)
        if result.terminated or result.truncated:
            state.end_episode(ep_return, length, eps)
            ep_return = 0.0
            length = 0
            if not state.budget_exhausted():
                obs = env.reset()


def _train_ppo(
    config: RunConfig, params: dict, env: Environment, agent: Agent, state: _TrialState
) -> None:
    optimizer = make_optimizer(config, params, agent)
    explore_rng = derive_rng(config.seed, STREAM_EXPLORE)
    update_rng = derive_rng(config.seed, STREAM_UPDATE)
    gamma = params["gamma"]
    lam = params["gae_lambda"]
    n_steps = params["rollout_steps"]
    obs = env.reset(seed=_env_seed(config))
    ep_return = 0.0
    length = 0
    pending_episodes: list[tuple[float, int]] = []
    while not state.budget_exhausted():
        observations = []
        actions = []
        log_probs = []
        masks = []
        rewards = []
        dones = []
        values = []
        for _ in range(n_steps):
            mask = env.action_mask()
            action, logp, _, value = _sample_policy_action(agent, obs, mask, explore_rng)
            result = env.step(action)
            observations.append(obs)
            actions.append(action)
            log_probs.append(logp)
            masks.append(mask)
            rewards.append(result.reward)
            values.append(value)
            done = result.terminated or result.truncated
            dones.append(done)
            ep_return += result.reward
            length += 1
            state.global_step += 1
            if done:
                pending_episodes.append((ep_return, length))
                ep_return = 0.0
                length = 0
                obs = env.reset()
            else:
                obs = result.observation
        bootstrap = 0.0 if dones[-1] else float(agent.forward(obs).auxiliary)
        advantages = _segmented_gae(rewards, values, dones, bootstrap, gamma, lam)
        returns = advantages + np.asarray(values, dtype=np.float64)
        rollout = Rollout(
            observations=np.asarray(observations),
            actions=np.asarray(actions),
            log_probs=np.asarray(log_probs),
            masks=np.asarray(masks),
            advantages=advantages,
            returns=returns,
        )
        stats = ppo_update(
            agent,
            optimizer,
            rollout,
            update_rng,
            clip=params["clip"],
            epochs=params["epochs"],
            minibatch_size=params["minibatch_size"],
            value_coef=params["value_coef"],
            entropy_coef=params["entropy_coef"],
        )
        state.record_loss(stats["loss"])
        for finished_return, finished_length in pending_episodes:
            state.end_episode(finished_return, finished_length)
            if state.budget_exhausted():
                break
        pending_episodes = []


def _segmented_gae(
    rewards: list[float],
    values: list[float],
    dones: list[bool],
    bootstrap: float,
    gamma: float,
    lam: float,
) -> np.ndarray:
    """GAE over a rollout that may span several episodes.

    Each done flag closes a segment with bootstrap value 0; the final open
    segment bootstraps with the value of the state after the rollout.
    """
    advantages = np.empty(len(rewards))
    start = 0
    for t in range(len(rewards)):
        if dones[t]:
            seg_values = values[start : t + 1] + [0.0]
            advantages[start : t + 1] = gae(rewards[start : t + 1], seg_values, gamma, lam)
            start = t + 1
    if start < len(rewards):
        seg_values = values[start:] + [bootstrap]
        advantages[start:] = gae(rewards[start:], seg_values, gamma, lam)
    return advantages
