"""Cart-pole balancing with the standard physical constants.

State is (cart position x, cart velocity, pole angle theta, pole angular
velocity).  Euler integration with tau = 0.02; episode ends when |x| > 2.4
or |theta| > 12 degrees, truncates at 500 steps, reward +1 per step.
"""

from __future__ import annotations

import math

import numpy as np

from .base import CONTINUOUS, Environment, SpaceDescriptor, StepResult

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = POLE_MASS * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02
X_LIMIT = 2.4
THETA_LIMIT = 12.0 * math.pi / 180.0
MAX_STEPS = 500


def dynamics(state: np.ndarray, force: float) -> np.ndarray:
    """One Euler step of the cart-pole equations under an arbitrary force."""
    x, x_dot, theta, theta_dot = state
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t**2 / TOTAL_MASS)
    )
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
    return np.array(
        [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ]
    )


class CartPoleEnv(Environment):
    descriptor = SpaceDescriptor(
        observation_dim=4,
        action_count=2,
        observation_kind=CONTINUOUS,
        bounds=((-X_LIMIT, X_LIMIT), None, (-THETA_LIMIT, THETA_LIMIT), None),
    )

    def __init__(self) -> None:
        super().__init__()
        self.state = np.zeros(4)
        self.steps = 0

    def reset(self, seed: int | None = None) -> np.ndarray:
        self._begin_episode(seed)
        self.state = self._rng.uniform(-0.05, 0.05, size=4)
        self.steps = 0
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        self._require_active()
        if action not in (0, 1):
            raise ValueError(f"cartpole action must be 0 or 1, got {action}")
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        self.state = dynamics(self.state, force)
        self.steps += 1
        x, _, theta, _ = self.state
        terminated = bool(abs(x) > X_LIMIT or abs(theta) > THETA_LIMIT)
        truncated = not terminated and self.steps >= MAX_STEPS
        return self._finish(StepResult(self.state.copy(), 1.0, terminated, truncated))
