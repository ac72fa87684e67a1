"""Circuit-execution accounting.

One "execution" is one full statevector run of a circuit, no matter how many
observables are read from the final state.  A forward pass therefore costs 1
and a parameter-shift gradient costs 2 * (number of trainable parameter
occurrences).

The active counter is ambient: ``run_circuit`` and the gradient routines
increment whatever counter the enclosing ``counting(...)`` block installed.
Counters are per trial; parallel trials each install their own.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar


class ExecutionCounter:
    """Monotone counter of circuit executions."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def add(self, n: int = 1) -> None:
        self.count += n

    def __repr__(self) -> str:
        return f"ExecutionCounter(count={self.count})"


_active: ContextVar[ExecutionCounter | None] = ContextVar("qrlforge_counter", default=None)


@contextmanager
def counting(counter: ExecutionCounter | None):
    """Install ``counter`` as the ambient execution counter for the block."""
    token = _active.set(counter)
    try:
        yield counter
    finally:
        _active.reset(token)


def add_executions(n: int) -> None:
    counter = _active.get()
    if counter is not None:
        counter.add(n)


def active_counter() -> ExecutionCounter | None:
    return _active.get()
