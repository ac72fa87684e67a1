"""Config loading, single/batch trial execution, and parallel grid search."""

from __future__ import annotations

import copy
import csv
import io
import itertools
import json
import math
import time
import warnings as _warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .agents import make_agent
from .algorithms.train import STREAM_AGENT, derive_rng, train
from .config import RunConfig, resolve_algorithm_params
from .envs import make_env
from .errors import ConfigError, TrialError
from .metrics import MetricsSink
from .qsim import ExecutionCounter

_ROLE_FOR_ALGORITHM = {"dqn": "value", "reinforce": "policy", "ppo": "actor-critic"}


class ConfigWarning(UserWarning):
    """Non-fatal config issue, e.g. an unknown key that was ignored."""


@dataclass
class TrialResult:
    """Outcome of one trial; ``error`` is set instead of metrics on failure."""

    run_name: str
    seed: int
    config_hash: str
    config: dict
    final_return_mean: float | None = None
    eval_return_mean: float | None = None
    total_env_steps: int = 0
    total_circuit_executions: int = 0
    wall_time_s: float = 0.0
    metrics_path: str | None = None
    error: str | None = None


@dataclass
class GridSpec:
    """A base config plus candidate lists per (dotted) hyperparameter path."""

    base: RunConfig
    grid: dict[str, list] = field(default_factory=dict)
    trials_per_config: int = 1

    def validate(self) -> None:
        if self.trials_per_config < 1:
            raise ConfigError("trials_per_config must be positive")
        for name, candidates in self.grid.items():
            if not isinstance(candidates, list) or not candidates:
                raise ConfigError(f"grid axis {name!r} must be a non-empty list")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate one run-config file; unknown keys warn, not fail."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    config, warns = RunConfig.from_dict(raw)
    for message in warns:
        _warnings.warn(f"{path}: {message}", ConfigWarning, stacklevel=2)
    return config


def load_gridspec(path: str | Path) -> GridSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"grid file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    grid = raw.pop("grid", {})
    trials = int(raw.pop("trials_per_config", 1))
    base, warns = RunConfig.from_dict(raw)
    for message in warns:
        _warnings.warn(f"{path}: {message}", ConfigWarning, stacklevel=2)
    spec = GridSpec(base=base, grid=dict(grid), trials_per_config=trials)
    spec.validate()
    return spec


def trial_directory(config: RunConfig) -> Path:
    return Path(config.output_dir) / config.run_name / f"seed{config.seed}"


def run_single(config: RunConfig) -> TrialResult:
    """Train one agent and write metrics.jsonl, params.json and summary.json."""
    t0 = time.perf_counter()
    try:
        # fail on bad combinations before touching the filesystem
        resolve_algorithm_params(config.algorithm, config.agent_kind, config.algorithm_params)
        env = make_env(config.env_id)
        counter = ExecutionCounter()
        agent = make_agent(
            config.agent_kind,
            _ROLE_FOR_ALGORITHM[config.algorithm],
            env.descriptor,
            config.agent_params,
            derive_rng(config.seed, STREAM_AGENT),
            counter,
        )
    except ConfigError:
        raise
    except Exception as exc:  # construction failures carry trial context
        raise TrialError(f"trial {config.run_name}/seed{config.seed}: {exc}") from exc

    out_dir = trial_directory(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(json.dumps(config.to_dict(), indent=1))
    metrics_path = out_dir / "metrics.jsonl"
    try:
        with MetricsSink(metrics_path) as sink:
            summary = train(config, env, agent, sink)
        agent.save(out_dir / "params.json")
    except ConfigError:
        raise
    except Exception as exc:
        raise TrialError(f"trial {config.run_name}/seed{config.seed}: {exc}") from exc
    result = TrialResult(
        run_name=config.run_name,
        seed=config.seed,
        config_hash=config.config_hash(),
        config=config.to_dict(),
        final_return_mean=summary.final_return_mean,
        eval_return_mean=summary.eval_return_mean,
        total_env_steps=summary.total_steps,
        total_circuit_executions=summary.total_executions,
        wall_time_s=time.perf_counter() - t0,
        metrics_path=str(metrics_path),
    )
    (out_dir / "summary.json").write_text(json.dumps(asdict(result), indent=1))
    return result


def run_configs(configs: list[RunConfig], continue_on_error: bool = False) -> list[TrialResult]:
    """Run configs in order; the first failure aborts unless told to continue."""
    results: list[TrialResult] = []
    for config in configs:
        try:
            results.append(run_single(config))
        except Exception as exc:
            if not continue_on_error:
                raise
            results.append(
                TrialResult(
                    run_name=config.run_name,
                    seed=config.seed,
                    config_hash=config.config_hash(),
                    config=config.to_dict(),
                    error=str(exc),
                )
            )
    return results


def run_batch(paths: list[str | Path], continue_on_error: bool = False) -> list[TrialResult]:
    """Run config files sequentially; any parse error aborts before trial one."""
    configs = [load_config(p) for p in paths]
    return run_configs(configs, continue_on_error)


def _set_dotted(tree: dict, path: str, value) -> None:
    parts = path.split(".")
    node = tree
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def expand_grid(spec: GridSpec) -> list[RunConfig]:
    """Cartesian product of grid axes times seeds, in a reproducible order.

    Axes iterate lexicographically by name, values in their listed order,
    seeds innermost (base seed + 0..trials_per_config-1).  Each grid point
    gets run_name "<base>-<index>"; seeds share the point's run name.
    """
    spec.validate()
    names = sorted(spec.grid)
    value_lists = [spec.grid[name] for name in names]
    configs: list[RunConfig] = []
    for point_index, combo in enumerate(itertools.product(*value_lists)):
        for seed_offset in range(spec.trials_per_config):
            tree = copy.deepcopy(spec.base.to_dict())
            for name, value in zip(names, combo):
                _set_dotted(tree, name, value)
            tree["run_name"] = f"{spec.base.run_name}-{point_index:03d}"
            tree["seed"] = spec.base.seed + seed_offset
            config, _ = RunConfig.from_dict(tree)
            configs.append(config)
    return configs


def _guarded_run(config: RunConfig) -> TrialResult:
    try:
        return run_single(config)
    except Exception as exc:
        return TrialResult(
            run_name=config.run_name,
            seed=config.seed,
            config_hash=config.config_hash(),
            config=config.to_dict(),
            error=str(exc),
        )


@dataclass
class TuneReport:
    results: list[TrialResult]
    failures: list[TrialResult]
    csv_path: str


SUMMARY_CSV_HEADER = [
    "rank",
    "run_name",
    "config_hash",
    "final_return_mean",
    "total_env_steps",
    "total_circuit_executions",
    "wall_time_s",
    "metrics_path",
]


def summary_table(results: list[TrialResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SUMMARY_CSV_HEADER)
    for rank, r in enumerate(results, start=1):
        writer.writerow(
            [
                rank,
                f"{r.run_name}/seed{r.seed}",
                r.config_hash,
                "" if r.final_return_mean is None else f"{r.final_return_mean:.6g}",
                r.total_env_steps,
                r.total_circuit_executions,
                f"{r.wall_time_s:.3f}",
                r.metrics_path or "",
            ]
        )
    return buf.getvalue()


def tune(spec: GridSpec, max_parallel: int = 1) -> TuneReport:
    """Run the expanded grid with a bounded worker pool and rank the outcomes.

    Trials run in separate processes (own RNG streams, envs, agents, files),
    so per-trial outputs do not depend on max_parallel.  Individual failures
    are recorded and do not abort sibling trials.  Results rank by final
    mean return, ties broken by fewer circuit executions, then grid order.
    """
    if max_parallel < 1:
        raise ConfigError(f"max_parallel must be >= 1, got {max_parallel}")
    configs = expand_grid(spec)
    if max_parallel == 1:
        outcomes = [_guarded_run(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=max_parallel) as pool:
            outcomes = list(pool.map(_guarded_run, configs))
    order = {id(r): i for i, r in enumerate(outcomes)}
    successes = [r for r in outcomes if r.error is None]
    failures = [r for r in outcomes if r.error is not None]
    successes.sort(
        key=lambda r: (
            -(r.final_return_mean if r.final_return_mean is not None else -math.inf),
            r.total_circuit_executions,
            order[id(r)],
        )
    )
    csv_dir = Path(spec.base.output_dir) / spec.base.run_name
    csv_dir.mkdir(parents=True, exist_ok=True)
    csv_path = csv_dir / "summary.csv"
    csv_path.write_text(summary_table(successes))
    return TuneReport(results=successes, failures=failures, csv_path=str(csv_path))
