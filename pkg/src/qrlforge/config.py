"""Run configuration: schema, defaults, validation, and hashing.

A RunConfig file is flat JSON plus nested "algorithm_params" and
"agent_params" objects.  Required keys: run_name, algorithm, agent_kind,
env_id; everything else is defaulted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError

ALGORITHMS = ("reinforce", "dqn", "ppo")
AGENT_KINDS = ("classical", "quantum")

# applies when neither a step nor an episode budget is configured
DEFAULT_TOTAL_EPISODES = 100

COMMON_PARAM_DEFAULTS: dict = {
    "gamma": 0.99,
    "early_stop_return": None,
    "eval_interval_episodes": 0,
    "eval_episodes": 100,
    "eval_threshold": None,
    # learning rates: "lr" drives classical agents; the per-group quantum
    # rates default to lr_w=1e-2 and lr_theta=lr_lambda=1e-3 (bounded
    # expectations need the larger output-scale rate)
    "lr": None,
    "lr_theta": None,
    "lr_lambda": None,
    "lr_w": None,
    "lr_beta": None,
}

ALGORITHM_PARAM_DEFAULTS: dict[str, dict] = {
    "reinforce": {
        "baseline": "mean",
        "episodes_per_update": 1,
    },
    "dqn": {
        "buffer_capacity": 10_000,
        "batch_size": None,  # 32 classical / 16 quantum
        "train_frequency": 1,
        "learning_starts": 1000,
        "target_sync_interval": 100,
        "epsilon_start": 1.0,
        "epsilon_end": 0.05,
        "epsilon_decay_fraction": 0.5,
        "exploration_total_steps": None,
    },
    "ppo": {
        "rollout_steps": 128,
        "clip": 0.2,
        "gae_lambda": 0.95,
        "epochs": 4,
        "minibatch_size": 32,
        "value_coef": 0.5,
        "entropy_coef": 0.01,
    },
}

CLASSICAL_LR_DEFAULTS = {"reinforce": 1e-2, "dqn": 2.5e-4, "ppo": 2.5e-4}
QUANTUM_LR_DEFAULTS = {"lr_theta": 1e-3, "lr_lambda": 1e-3, "lr_w": 1e-2, "lr_beta": 1e-3}

AGENT_PARAM_KEYS = {"hidden_layers", "n_qubits", "n_layers", "ansatz", "knapsack_penalty"}

_TOP_LEVEL_KEYS = {
    "run_name",
    "algorithm",
    "agent_kind",
    "env_id",
    "seed",
    "total_timesteps",
    "total_episodes",
    "output_dir",
    "algorithm_params",
    "agent_params",
}


@dataclass
class RunConfig:
    """Complete declarative description of one training trial."""

    run_name: str
    algorithm: str
    agent_kind: str
    env_id: str
    seed: int = 1
    total_timesteps: int | None = None
    total_episodes: int | None = None
    output_dir: str = "runs"
    algorithm_params: dict = field(default_factory=dict)
    agent_params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> tuple["RunConfig", list[str]]:
        """Parse with defaults; unknown keys become warnings, not errors."""
        warnings: list[str] = []
        for key in ("run_name", "algorithm", "agent_kind", "env_id"):
            if key not in raw:
                raise ConfigError(f"missing required config key {key!r}")
        for key in raw:
            if key not in _TOP_LEVEL_KEYS:
                warnings.append(f"unknown config key {key!r} ignored")
        algorithm = str(raw["algorithm"])
        algo_params = dict(raw.get("algorithm_params") or {})
        known_algo = set(COMMON_PARAM_DEFAULTS) | set(ALGORITHM_PARAM_DEFAULTS.get(algorithm, {}))
        for key in algo_params:
            if key not in known_algo:
                warnings.append(f"unknown algorithm_params key {key!r} ignored")
        agent_params = dict(raw.get("agent_params") or {})
        for key in agent_params:
            if key not in AGENT_PARAM_KEYS:
                warnings.append(f"unknown agent_params key {key!r} ignored")
        config = cls(
            run_name=str(raw["run_name"]),
            algorithm=algorithm,
            agent_kind=str(raw["agent_kind"]),
            env_id=str(raw["env_id"]),
            seed=int(raw.get("seed", 1)),
            total_timesteps=None if raw.get("total_timesteps") is None else int(raw["total_timesteps"]),
            total_episodes=None if raw.get("total_episodes") is None else int(raw["total_episodes"]),
            output_dir=str(raw.get("output_dir", "runs")),
            algorithm_params=algo_params,
            agent_params=agent_params,
        )
        config.validate()
        return config, warnings

    def validate(self) -> None:
        from .envs import known_env_ids, make_env

        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.agent_kind not in AGENT_KINDS:
            raise ConfigError(f"unknown agent_kind {self.agent_kind!r}; choose from {AGENT_KINDS}")
        try:
            make_env(self.env_id)
        except ValueError as exc:
            raise ConfigError(f"env_id {self.env_id!r}: {exc}") from exc
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.total_timesteps is not None and self.total_timesteps < 0:
            raise ConfigError("total_timesteps must be >= 0")
        if self.total_episodes is not None and self.total_episodes < 0:
            raise ConfigError("total_episodes must be >= 0")
        if not self.run_name:
            raise ConfigError("run_name must be non-empty")

    def budget(self) -> tuple[int | None, int | None]:
        """(total_timesteps, total_episodes) with the documented fallback."""
        if self.total_timesteps is None and self.total_episodes is None:
            return None, DEFAULT_TOTAL_EPISODES
        return self.total_timesteps, self.total_episodes

    def to_dict(self) -> dict:
        return {
            "run_name": self.run_name,
            "algorithm": self.algorithm,
            "agent_kind": self.agent_kind,
            "env_id": self.env_id,
            "seed": self.seed,
            "total_timesteps": self.total_timesteps,
            "total_episodes": self.total_episodes,
            "output_dir": self.output_dir,
            "algorithm_params": dict(self.algorithm_params),
            "agent_params": dict(self.agent_params),
        }

    def config_hash(self) -> str:
        """Identifies the hyperparameter point; seed, name and paths excluded."""
        payload = self.to_dict()
        for key in ("seed", "run_name", "output_dir"):
            payload.pop(key)
        canonical = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def resolve_algorithm_params(algorithm: str, agent_kind: str, overrides: dict) -> dict:
    """Merge defaults with config overrides and resolve kind-dependent values."""
    if algorithm not in ALGORITHM_PARAM_DEFAULTS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    params = dict(COMMON_PARAM_DEFAULTS)
    params.update(ALGORITHM_PARAM_DEFAULTS[algorithm])
    for key, value in overrides.items():
        if key in params:
            params[key] = value
    if params.get("lr") is None:
        params["lr"] = CLASSICAL_LR_DEFAULTS[algorithm]
    for key, default in QUANTUM_LR_DEFAULTS.items():
        if params.get(key) is None:
            params[key] = default
    if algorithm == "dqn" and params["batch_size"] is None:
        params["batch_size"] = 16 if agent_kind == "quantum" else 32
    if not 0.0 <= params["gamma"] <= 1.0:
        raise ConfigError(f"gamma must lie in [0, 1], got {params['gamma']}")
    if algorithm == "dqn":
        if params["learning_starts"] < params["batch_size"]:
            raise ConfigError(
                "learning_starts must be >= batch_size so every scheduled update "
                f"finds a full batch (got {params['learning_starts']} < {params['batch_size']})"
            )
        if params["train_frequency"] < 1 or params["target_sync_interval"] < 1:
            raise ConfigError("train_frequency and target_sync_interval must be positive")
    if algorithm == "ppo":
        if params["rollout_steps"] < 1 or params["minibatch_size"] < 1 or params["epochs"] < 1:
            raise ConfigError("rollout_steps, minibatch_size and epochs must be positive")
    if algorithm == "reinforce":
        if params["episodes_per_update"] < 1:
            raise ConfigError("episodes_per_update must be positive")
        if params["baseline"] not in ("mean", "none"):
            raise ConfigError(f"unknown baseline {params['baseline']!r}")
    return params


def learning_rates_for(agent_kind: str, params: dict) -> tuple[dict[str, float], float]:
    """(per-group learning rates, default rate) for GroupedAdam."""
    if agent_kind == "classical":
        lr = float(params["lr"])
        return {"policy": lr, "critic": lr}, lr
    rates = {
        "theta": float(params["lr_theta"]),
        "lambda": float(params["lr_lambda"]),
        "w": float(params["lr_w"]),
        "beta": float(params["lr_beta"]),
        "critic_theta": float(params["lr_theta"]),
        "critic_lambda": float(params["lr_lambda"]),
        "critic_w": float(params["lr_w"]),
    }
    return rates, float(params["lr_theta"])
