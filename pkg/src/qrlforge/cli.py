"""Command-line entry point: train / batch / tune / report.

Exit codes: 0 success, 1 config or usage error, 2 runtime failure.
Flag overrides beat config-file values, which beat built-in defaults;
QRLFORGE_OUTPUT_DIR substitutes for --output-dir when the flag is absent.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys
import warnings as _warnings

from .config import RunConfig
from .errors import ConfigError
from .metrics import summarize, summary_to_csv
from .runner import (
    ConfigWarning,
    load_config,
    load_gridspec,
    run_configs,
    run_single,
    summary_table,
    tune,
)

OUTPUT_DIR_ENV = "QRLFORGE_OUTPUT_DIR"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="qrlforge", description="Train classical and quantum RL agents")
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train a single agent from a config file")
    train_p.add_argument("--config", required=True)
    _add_overrides(train_p)

    batch_p = sub.add_parser("batch", help="run several config files sequentially")
    batch_p.add_argument("--configs", required=True, nargs="+")
    batch_p.add_argument("--continue-on-error", action="store_true")
    _add_overrides(batch_p)

    tune_p = sub.add_parser("tune", help="parallel grid search from a grid-spec file")
    tune_p.add_argument("--grid", required=True)
    tune_p.add_argument("--max-parallel", type=int, default=1)
    _add_overrides(tune_p)

    report_p = sub.add_parser("report", help="aggregate metrics files into a CSV report")
    report_p.add_argument("--metrics", required=True, help="glob for metrics.jsonl files")
    report_p.add_argument("--threshold", type=float, default=None)
    return parser


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--output-dir", default=None, help="override the output root")


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.seed is not None:
        config.seed = args.seed
    output_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
    if output_dir:
        config.output_dir = output_dir
    config.validate()
    return config


def _cmd_train(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    result = run_single(config)
    print(
        f"{result.run_name}/seed{result.seed}: final_return_mean="
        f"{result.final_return_mean} steps={result.total_env_steps} "
        f"circuit_executions={result.total_circuit_executions} "
        f"metrics={result.metrics_path}"
    )
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    configs = [_apply_overrides(load_config(p), args) for p in args.configs]
    results = run_configs(configs, continue_on_error=args.continue_on_error)
    for result in results:
        status = f"error: {result.error}" if result.error else f"return={result.final_return_mean}"
        print(f"{result.run_name}/seed{result.seed}: {status}")
    return 0


def _cmd_tune(args: argparse.Namespace) -> int:
    if args.max_parallel < 1:
        raise ConfigError(f"--max-parallel must be >= 1, got {args.max_parallel}")
    spec = load_gridspec(args.grid)
    _apply_overrides(spec.base, args)
    report = tune(spec, max_parallel=args.max_parallel)
    print(summary_table(report.results), end="")
    for failure in report.failures:
        print(f"FAILED {failure.run_name}/seed{failure.seed}: {failure.error}", file=sys.stderr)
    print(f"summary written to {report.csv_path}", file=sys.stderr)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    paths = sorted(glob.glob(args.metrics, recursive=True))
    if not paths:
        print(f"no metrics files match {args.metrics!r}", file=sys.stderr)
    rows = summarize(paths, args.threshold)
    print(summary_to_csv(rows), end="")
    return 0


_HANDLERS = {"train": _cmd_train, "batch": _cmd_batch, "tune": _cmd_tune, "report": _cmd_report}


def parse_and_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    with _warnings.catch_warnings():
        _warnings.simplefilter("always", ConfigWarning)
        try:
            return _HANDLERS[args.command](args)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 1
        except Exception as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
