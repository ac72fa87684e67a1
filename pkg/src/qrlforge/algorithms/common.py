"""Shared training machinery: returns, GAE, schedules, replay, action sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASKED_LOGIT = -1e9


@dataclass(slots=True)
class Transition:
    """One environment interaction, as stored in the replay buffer.

    ``next_mask`` carries the valid-action mask of the next state so that
    bootstrap targets on masked environments only maximize over legal moves.
    """

    observation: np.ndarray
    action: int
    reward: float
    next_observation: np.ndarray
    terminated: bool
    next_mask: np.ndarray | None = None


class ReplayBuffer:
    """Ring storage; insertion beyond capacity evicts the oldest element."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._storage: list[Transition] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._storage)

    def push(self, transition: Transition) -> None:
        if len(self._storage) < self.capacity:
            self._storage.append(transition)
        else:
            self._storage[self._cursor] = transition
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, rng: np.random.Generator, batch_size: int) -> list[Transition] | None:
        """Uniform draw with replacement; None while underfilled (caller skips)."""
        if len(self._storage) < batch_size:
            return None
        indices = rng.integers(0, len(self._storage), size=batch_size)
        return [self._storage[i] for i in indices]


@dataclass
class Trajectory:
    """One episode of policy-gradient bookkeeping; all sequences share length."""

    observations: list[np.ndarray] = field(default_factory=list)
    actions: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    log_probs: list[float] = field(default_factory=list)
    probs: list[np.ndarray] = field(default_factory=list)
    values: list[float] | None = None

    def __len__(self) -> int:
        return len(self.rewards)

    def check(self) -> None:
        n = len(self.rewards)
        for name in ("observations", "actions", "log_probs", "probs"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"trajectory field {name} has mismatched length")
        if self.values is not None and len(self.values) != n:
            raise ValueError("trajectory values have mismatched length")


def discounted_returns(rewards, gamma: float) -> np.ndarray:
    """G_t = r_t + gamma * G_{t+1}, with G_T = r_T."""
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise ValueError("rewards must be non-empty")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    out = np.empty_like(rewards)
    acc = 0.0
    for t in range(rewards.size - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def gae(rewards, values, gamma: float, lam: float) -> np.ndarray:
    """Generalized advantage estimation over one contiguous segment.

    ``values`` must hold len(rewards) + 1 entries; the final entry is the
    bootstrap value of the state after the last reward (0 if terminal).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.size != rewards.size + 1:
        raise ValueError(f"values must have len(rewards)+1 entries, got {values.size} for {rewards.size}")
    advantages = np.empty_like(rewards)
    acc = 0.0
    for t in range(rewards.size - 1, -1, -1):
        delta = rewards[t] + gamma * values[t + 1] - values[t]
        acc = delta + gamma * lam * acc
        advantages[t] = acc
    return advantages


def epsilon(
    step: int,
    start: float = 1.0,
    end: float = 0.05,
    decay_fraction: float = 0.5,
    total_steps: int = 1,
) -> float:
    """Linear decay from start to end over decay_fraction * total_steps, then flat."""
    if total_steps <= 0:
        raise ValueError(f"total_steps must be positive, got {total_steps}")
    decay_steps = decay_fraction * total_steps
    if decay_steps <= 0 or step >= decay_steps:
        return end
    return start + (end - start) * (step / decay_steps)


def masked_logits(values: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    if mask is None:
        return np.asarray(values, dtype=np.float64)
    return np.where(mask, values, MASKED_LOGIT)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def sample_categorical(rng: np.random.Generator, probs: np.ndarray) -> int:
    """Inverse-CDF draw; deterministic for a fixed generator state."""
    cum = np.cumsum(probs)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right").clip(0, probs.size - 1))


def masked_argmax(values: np.ndarray, mask: np.ndarray | None) -> int:
    """Greedy action over valid entries; ties break to the lowest index."""
    return int(np.argmax(masked_logits(values, mask)))


def huber(delta: np.ndarray, threshold: float = 1.0) -> np.ndarray:
    delta = np.asarray(delta, dtype=np.float64)
    small = np.abs(delta) <= threshold
    return np.where(small, 0.5 * delta**2, threshold * (np.abs(delta) - 0.5 * threshold))


def huber_grad(delta: np.ndarray, threshold: float = 1.0) -> np.ndarray:
    return np.clip(np.asarray(delta, dtype=np.float64), -threshold, threshold)
