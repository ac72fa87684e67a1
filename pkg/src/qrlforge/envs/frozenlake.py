"""4x4 frozen-lake grid: reach G from S without falling into holes.

Actions: 0 = left, 1 = down, 2 = right, 3 = up.  Deterministic moves by
default; the slippery variant moves in the intended direction or either
perpendicular one with probability 1/3 each.  The observation is the cell
index as a length-1 vector.
"""

from __future__ import annotations

import numpy as np

from .base import DISCRETE_INDEX, Environment, SpaceDescriptor, StepResult

LAYOUT = ("SFFF", "FHFH", "FFFH", "HFFG")
SIZE = 4
N_STATES = SIZE * SIZE
MAX_STEPS = 100

LEFT, DOWN, RIGHT, UP = range(4)
_MOVES = {LEFT: (0, -1), DOWN: (1, 0), RIGHT: (0, 1), UP: (-1, 0)}


def cell(index: int) -> str:
    return LAYOUT[index // SIZE][index % SIZE]


class FrozenLakeEnv(Environment):
    descriptor = SpaceDescriptor(
        observation_dim=1,
        action_count=4,
        observation_kind=DISCRETE_INDEX,
        n_states=N_STATES,
    )

    def __init__(self, slippery: bool = False) -> None:
        super().__init__()
        self.slippery = slippery
        self.position = 0
        self.steps = 0

    def _obs(self) -> np.ndarray:
        return np.array([float(self.position)])

    def reset(self, seed: int | None = None) -> np.ndarray:
        self._begin_episode(seed)
        self.position = 0
        self.steps = 0
        return self._obs()

    def _move(self, position: int, action: int) -> int:
        row, col = divmod(position, SIZE)
        dr, dc = _MOVES[action]
        nr, nc = row + dr, col + dc
        if not (0 <= nr < SIZE and 0 <= nc < SIZE):
            return position
        return nr * SIZE + nc

    def step(self, action: int) -> StepResult:
        self._require_active()
        if not 0 <= action < 4:
            raise ValueError(f"frozenlake action must be in 0..3, got {action}")
        if self.slippery:
            # intended direction or either perpendicular, 1/3 each
            choices = [action, (action - 1) % 4, (action + 1) % 4]
            action = int(choices[self._rng.integers(3)])
        self.position = self._move(self.position, action)
        self.steps += 1
        tile = cell(self.position)
        reward = 1.0 if tile == "G" else 0.0
        terminated = tile in ("G", "H")
        truncated = not terminated and self.steps >= MAX_STEPS
        return self._finish(StepResult(self._obs(), reward, terminated, truncated))
