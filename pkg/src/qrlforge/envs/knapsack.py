"""Sequential knapsack packing.

Each episode presents items with values and weights; taking an item pays its
value while the running weight stays within capacity and ends the episode
with a penalty otherwise.  Action n_items is STOP (always valid, reward 0).
Re-taking an item raises InvalidActionError.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidActionError
from .base import CONTINUOUS, Environment, SpaceDescriptor, StepResult


class KnapsackEnv(Environment):
    """Observation: per item (value, weight, taken bit) ++ remaining capacity."""

    def __init__(
        self,
        n_items: int = 6,
        values: np.ndarray | None = None,
        weights: np.ndarray | None = None,
        capacity: float | None = None,
        penalty: float = 1.0,
    ) -> None:
        super().__init__()
        if n_items < 1:
            raise ValueError(f"knapsack needs at least 1 item, got {n_items}")
        self.n_items = n_items
        self.penalty = penalty
        self.fixed_values = None if values is None else np.asarray(values, dtype=np.float64)
        self.fixed_weights = None if weights is None else np.asarray(weights, dtype=np.float64)
        if self.fixed_values is not None and self.fixed_values.size != n_items:
            raise ValueError("values length does not match n_items")
        if self.fixed_weights is not None and self.fixed_weights.size != n_items:
            raise ValueError("weights length does not match n_items")
        self.fixed_capacity = capacity
        self.descriptor = SpaceDescriptor(
            observation_dim=3 * n_items + 1,
            action_count=n_items + 1,
            observation_kind=CONTINUOUS,
            knapsack_items=n_items,
        )
        self.values = np.zeros(n_items)
        self.weights = np.zeros(n_items)
        self.capacity = 1.0
        self.taken = np.zeros(n_items, dtype=bool)
        self.load = 0.0
        self.steps = 0

    @property
    def stop_action(self) -> int:
        return self.n_items

    def _obs(self) -> np.ndarray:
        per_item = np.column_stack([self.values, self.weights, self.taken.astype(np.float64)])
        return np.concatenate([per_item.ravel(), [self.capacity - self.load]])

    def reset(self, seed: int | None = None) -> np.ndarray:
        self._begin_episode(seed)
        if self.fixed_values is not None:
            self.values = self.fixed_values.copy()
        else:
            self.values = 1.0 - self._rng.uniform(0.0, 1.0, size=self.n_items)
        if self.fixed_weights is not None:
            self.weights = self.fixed_weights.copy()
        else:
            self.weights = 1.0 - self._rng.uniform(0.0, 1.0, size=self.n_items)
        self.capacity = float(self.fixed_capacity) if self.fixed_capacity is not None else float(
            self.weights.sum() / 2.0
        )
        self.taken = np.zeros(self.n_items, dtype=bool)
        self.load = 0.0
        self.steps = 0
        return self._obs()

    def action_mask(self) -> np.ndarray:
        mask = np.ones(self.n_items + 1, dtype=bool)
        mask[: self.n_items] = ~self.taken
        return mask

    def step(self, action: int) -> StepResult:
        self._require_active()
        if not 0 <= action <= self.n_items:
            raise ValueError(f"knapsack action out of range: {action}")
        self.steps += 1
        if action == self.stop_action:
            return self._finish(StepResult(self._obs(), 0.0, True, False))
        if self.taken[action]:
            raise InvalidActionError(f"item {action} was already taken")
        self.taken[action] = True
        new_load = self.load + float(self.weights[action])
        if new_load > self.capacity:
            return self._finish(StepResult(self._obs(), -self.penalty, True, False))
        self.load = new_load
        reward = float(self.values[action])
        terminated = bool(self.taken.all())
        truncated = not terminated and self.steps >= self.n_items + 1
        return self._finish(StepResult(self._obs(), reward, terminated, truncated))
