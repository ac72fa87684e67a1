"""Per-trial metric logging (line-delimited JSON) and report aggregation.

One JSON object per line, field names exactly: episode, global_step, return,
length, loss, epsilon, circuit_executions, wall_time_s.  Optional fields are
null when absent.  Records within a trial must be monotone in global_step
and circuit_executions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import MetricsOrderError
from .qsim.counting import ExecutionCounter

__all__ = [
    "ExecutionCounter",
    "MetricRecord",
    "MetricsSink",
    "read_records",
    "summarize",
    "summary_to_csv",
    "SummaryRow",
]


@dataclass
class MetricRecord:
    """One per-episode log row; ``episodic_return`` serializes as "return"."""

    episode: int
    global_step: int
    episodic_return: float
    length: int
    loss: float | None
    epsilon: float | None
    circuit_executions: int
    wall_time_s: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "episode": self.episode,
                "global_step": self.global_step,
                "return": self.episodic_return,
                "length": self.length,
                "loss": self.loss,
                "epsilon": self.epsilon,
                "circuit_executions": self.circuit_executions,
                "wall_time_s": self.wall_time_s,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "MetricRecord":
        obj = json.loads(line)
        return cls(
            episode=int(obj["episode"]),
            global_step=int(obj["global_step"]),
            episodic_return=float(obj["return"]),
            length=int(obj["length"]),
            loss=None if obj.get("loss") is None else float(obj["loss"]),
            epsilon=None if obj.get("epsilon") is None else float(obj["epsilon"]),
            circuit_executions=int(obj["circuit_executions"]),
            wall_time_s=float(obj["wall_time_s"]),
        )


class MetricsSink:
    """Append-only JSONL writer for one trial; single writer, flushed per record."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", encoding="utf-8")
        self._last_step = -1
        self._last_execs = -1

    def log(self, record: MetricRecord) -> None:
        if record.global_step < self._last_step:
            raise MetricsOrderError(
                f"global_step went backwards: {record.global_step} after {self._last_step}"
            )
        if record.circuit_executions < self._last_execs:
            raise MetricsOrderError(
                f"circuit_executions went backwards: {record.circuit_executions} after {self._last_execs}"
            )
        self._last_step = record.global_step
        self._last_execs = record.circuit_executions
        self._fh.write(record.to_json() + "\n")
        self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "MetricsSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_records(path: str | Path) -> list[MetricRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(MetricRecord.from_json(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed metric record ({exc})") from exc
    return records


@dataclass
class SummaryRow:
    metrics_path: str
    episodes: int
    final_return_mean: float | None
    steps_to_threshold: int | None
    executions_at_threshold: int | None


def final_return_mean(records: list[MetricRecord], window: int = 20) -> float | None:
    if not records:
        return None
    tail = records[-window:]
    return sum(r.episodic_return for r in tail) / len(tail)


def summarize(paths: list[str | Path], threshold: float | None = None) -> list[SummaryRow]:
    """Per trial: final-20-episode mean return and the first threshold crossing."""
    rows = []
    for path in paths:
        records = read_records(path)
        steps_to = None
        execs_at = None
        if threshold is not None and not math.isnan(threshold):
            for r in records:
                if r.episodic_return >= threshold:
                    steps_to = r.global_step
                    execs_at = r.circuit_executions
                    break
        rows.append(
            SummaryRow(
                metrics_path=str(path),
                episodes=len(records),
                final_return_mean=final_return_mean(records),
                steps_to_threshold=steps_to,
                executions_at_threshold=execs_at,
            )
        )
    return rows


def summary_to_csv(rows: list[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["metrics_path", "episodes", "final_return_mean", "steps_to_threshold", "executions_at_threshold"]
    )
    for r in rows:
        writer.writerow(
            [
                r.metrics_path,
                r.episodes,
                "" if r.final_return_mean is None else f"{r.final_return_mean:.6g}",
                "" if r.steps_to_threshold is None else r.steps_to_threshold,
                "" if r.executions_at_threshold is None else r.executions_at_threshold,
            ]
        )
    return buf.getvalue()
