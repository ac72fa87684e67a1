"""Traveling-salesman tour construction over random unit-square instances.

Each episode samples city coordinates; the agent starts at city 0 and picks
the next unvisited city, earning the negative travel distance.  The step
that visits the last city also pays the closing edge back to city 0, so the
episode return equals minus the closed tour length.  Choosing a visited
city raises InvalidActionError; policies must mask.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidActionError
from .base import GRAPH, Environment, SpaceDescriptor, StepResult


def _descriptor(n_cities: int) -> SpaceDescriptor:
    n_pairs = n_cities * (n_cities - 1) // 2
    return SpaceDescriptor(
        observation_dim=n_pairs + 2 * n_cities,
        action_count=n_cities,
        observation_kind=GRAPH,
        graph_nodes=n_cities,
    )


class TspEnv(Environment):
    """Observation: upper-triangle distances ++ availability bits ++ one-hot current city."""

    def __init__(self, n_cities: int = 5) -> None:
        super().__init__()
        if n_cities < 2:
            raise ValueError(f"tsp needs at least 2 cities, got {n_cities}")
        self.n_cities = n_cities
        self.descriptor = _descriptor(n_cities)
        self.coords = np.zeros((n_cities, 2))
        self.distances = np.zeros((n_cities, n_cities))
        self.visited = np.zeros(n_cities, dtype=bool)
        self.current = 0
        self.steps = 0

    def _obs(self) -> np.ndarray:
        n = self.n_cities
        upper = [self.distances[i, j] for i in range(n) for j in range(i + 1, n)]
        availability = (~self.visited).astype(np.float64)
        one_hot = np.zeros(n)
        one_hot[self.current] = 1.0
        return np.concatenate([np.asarray(upper), availability, one_hot])

    def reset(self, seed: int | None = None) -> np.ndarray:
        self._begin_episode(seed)
        self.coords = self._rng.uniform(0.0, 1.0, size=(self.n_cities, 2))
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        self.distances = np.sqrt(np.sum(diff**2, axis=-1))
        self.visited = np.zeros(self.n_cities, dtype=bool)
        self.visited[0] = True
        self.current = 0
        self.steps = 0
        return self._obs()

    def action_mask(self) -> np.ndarray:
        return ~self.visited

    def step(self, action: int) -> StepResult:
        self._require_active()
        if not 0 <= action < self.n_cities:
            raise ValueError(f"city index out of range: {action}")
        if self.visited[action]:
            raise InvalidActionError(f"city {action} was already visited")
        reward = -float(self.distances[self.current, action])
        self.visited[action] = True
        self.current = action
        self.steps += 1
        terminated = bool(self.visited.all())
        if terminated:
            reward -= float(self.distances[self.current, 0])
        truncated = not terminated and self.steps >= self.n_cities
        return self._finish(StepResult(self._obs(), reward, terminated, truncated))
