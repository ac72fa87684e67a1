"""Analytic parameter-shift gradients for circuits built from a parameter vector."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import UnsupportedBindingError
from . import backend
from .counting import add_executions
from .gates import ROTATION_KINDS, ResolvedGate, gates_to_arrays
from .statevector import Observable, observables_to_arrays


def parameter_shift_gradient(
    n_qubits: int,
    circuit_builder: Callable[[np.ndarray], list[ResolvedGate]],
    params: np.ndarray | Sequence[float],
    observables: Sequence[Observable],
) -> np.ndarray:
    """Matrix of partials d<O_k>/d params[j], shape (len(observables), len(params)).

    ``circuit_builder`` maps a parameter vector to resolved gates that carry
    provenance: ``param_index`` names the parameter an angle came from and
    ``multiplier`` its chain-rule factor.  Each occurrence of a parameter is
    shifted by +-pi/2 in its gate angle, so the gradient costs exactly
    2 * (number of parameter occurrences) circuit executions.
    """
    params = np.asarray(params, dtype=np.float64)
    gates = list(circuit_builder(params))
    for g in gates:
        if g.param_index >= 0:
            if g.param_index >= params.size:
                raise ValueError(f"gate references parameter {g.param_index}, vector has {params.size}")
            if g.kind not in ROTATION_KINDS:
                raise UnsupportedBindingError(
                    f"parameter {g.param_index} enters through non-rotation gate {g.kind}"
                )
    kinds, q0, q1, angles, enabled, param_idx, param_mult = gates_to_arrays(gates, n_qubits)
    obs_arrays = observables_to_arrays(list(observables), n_qubits)
    grad, runs = backend.parameter_shift(
        n_qubits, kinds, q0, q1, angles, enabled, param_idx, param_mult, params.size, *obs_arrays
    )
    add_executions(runs)
    return grad
