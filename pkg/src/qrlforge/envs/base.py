"""Environment contract (reset/step), space metadata, and the registry."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import EpisodeDoneError

CONTINUOUS = "continuous"
DISCRETE_INDEX = "discrete-index"
GRAPH = "graph"


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool


@dataclass(frozen=True)
class SpaceDescriptor:
    """What an agent needs to know about an environment's spaces.

    ``bounds`` gives per-dimension finite ranges for continuous observations
    (None marks an unbounded dimension); ``n_states`` the cardinality of a
    discrete-index space; ``graph_nodes``/``knapsack_items`` carry the
    structured-environment sizes used by specialized ansatzes.
    """

    observation_dim: int
    action_count: int
    observation_kind: str
    n_states: int | None = None
    bounds: tuple[tuple[float, float] | None, ...] | None = None
    graph_nodes: int | None = None
    knapsack_items: int | None = None

    def __post_init__(self) -> None:
        if self.observation_dim < 1 or self.action_count < 1:
            raise ValueError("observation_dim and action_count must be positive")
        if self.observation_kind not in (CONTINUOUS, DISCRETE_INDEX, GRAPH):
            raise ValueError(f"unknown observation kind {self.observation_kind!r}")


class Environment(ABC):
    """Episodic environment with integer actions.

    ``reset(seed)`` starts a new episode; passing a seed reseeds the internal
    generator, otherwise the existing stream continues.  ``step`` after a
    terminal/truncated transition raises EpisodeDoneError.
    """

    descriptor: SpaceDescriptor

    def __init__(self) -> None:
        self._rng = np.random.default_rng()
        self._done = True

    @abstractmethod
    def reset(self, seed: int | None = None) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def step(self, action: int) -> StepResult:
        raise NotImplementedError

    def action_mask(self) -> np.ndarray:
        """Boolean validity per action; defaults to everything allowed."""
        return np.ones(self.descriptor.action_count, dtype=bool)

    def _begin_episode(self, seed: int | None) -> None:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._done = False

    def _require_active(self) -> None:
        if self._done:
            raise EpisodeDoneError("step() called on a finished episode; call reset()")

    def _finish(self, result: StepResult) -> StepResult:
        if result.terminated or result.truncated:
            self._done = True
        return result


_REGISTRY: dict[str, Callable[..., Environment]] = {}


def register_env(prefix: str, factory: Callable[..., Environment]) -> None:
    """Register a factory under an id prefix.

    Ids of the form ``prefix-<int>`` call ``factory(int)``; the bare prefix
    calls ``factory()``.
    """
    _REGISTRY[prefix] = factory


def make_env(env_id: str) -> Environment:
    if env_id in _REGISTRY:
        return _REGISTRY[env_id]()
    if "-" in env_id:
        prefix, _, suffix = env_id.rpartition("-")
        if prefix in _REGISTRY and suffix.isdigit():
            return _REGISTRY[prefix](int(suffix))
    raise ValueError(f"unknown environment id {env_id!r}; known: {sorted(_REGISTRY)}")


def known_env_ids() -> list[str]:
    return sorted(_REGISTRY)
