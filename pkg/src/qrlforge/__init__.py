"""qrlforge: classical and quantum reinforcement learning on one agent contract.

Quantum agents are parametrized quantum circuits simulated on a dense
statevector backend with analytic parameter-shift gradients; classical
agents are small dense networks.  Both satisfy the same forward/gradient
surface, so every training loop (REINFORCE, DQN, PPO) runs unchanged with
either kind.  Metrics track environment steps and circuit executions side
by side.
"""

from . import agents, algorithms, ansatz, envs, metrics, nn, qsim, runner
from .config import RunConfig
from .runner import GridSpec, TrialResult, expand_grid, load_config, run_batch, run_single, tune

__version__ = "0.1.0"

__all__ = [
    "agents",
    "algorithms",
    "ansatz",
    "envs",
    "metrics",
    "nn",
    "qsim",
    "runner",
    "RunConfig",
    "GridSpec",
    "TrialResult",
    "expand_grid",
    "load_config",
    "run_batch",
    "run_single",
    "tune",
    "__version__",
]
