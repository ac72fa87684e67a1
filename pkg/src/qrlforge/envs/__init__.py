"""Built-in environments and the reset/step contract."""

from .base import (
    CONTINUOUS,
    DISCRETE_INDEX,
    GRAPH,
    Environment,
    SpaceDescriptor,
    StepResult,
    known_env_ids,
    make_env,
    register_env,
)
from .cartpole import CartPoleEnv
from .frozenlake import FrozenLakeEnv
from .knapsack import KnapsackEnv
from .tsp import TspEnv
from .wrappers import wrap_continuous, wrap_discrete_index

register_env("cartpole", CartPoleEnv)
register_env("frozenlake-4x4", lambda: FrozenLakeEnv(slippery=False))
register_env("frozenlake-4x4-slippery", lambda: FrozenLakeEnv(slippery=True))
register_env("tsp", TspEnv)
register_env("knapsack", KnapsackEnv)

__all__ = [
    "CONTINUOUS",
    "DISCRETE_INDEX",
    "GRAPH",
    "Environment",
    "SpaceDescriptor",
    "StepResult",
    "known_env_ids",
    "make_env",
    "register_env",
    "CartPoleEnv",
    "FrozenLakeEnv",
    "KnapsackEnv",
    "TspEnv",
    "wrap_continuous",
    "wrap_discrete_index",
]
