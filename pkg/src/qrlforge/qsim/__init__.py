"""Dense statevector simulation of parametrized quantum circuits."""

from .backend import BACKEND_NAME, COMPILED, available_backends
from .counting import ExecutionCounter, active_counter, add_executions, counting
from .gates import (
    CNOT,
    CZ,
    GATE_KINDS,
    H,
    ROTATION_KINDS,
    RX,
    RY,
    RZ,
    ZZ,
    ConstAngle,
    Feature,
    GateOp,
    LambdaTimesFeature,
    ResolvedGate,
    Theta,
    ThetaTimesFeature,
)
from .gradients import parameter_shift_gradient
from .program import CircuitProgram
from .statevector import (
    MAX_QUBITS,
    Observable,
    Statevector,
    apply_gate,
    expectation,
    run_circuit,
    sample_expectation,
    zero_state,
)

__all__ = [
    "BACKEND_NAME",
    "COMPILED",
    "available_backends",
    "ExecutionCounter",
    "active_counter",
    "add_executions",
    "counting",
    "CNOT",
    "CZ",
    "GATE_KINDS",
    "H",
    "ROTATION_KINDS",
    "RX",
    "RY",
    "RZ",
    "ZZ",
    "ConstAngle",
    "Feature",
    "GateOp",
    "LambdaTimesFeature",
    "ResolvedGate",
    "Theta",
    "ThetaTimesFeature",
    "parameter_shift_gradient",
    "CircuitProgram",
    "MAX_QUBITS",
    "Observable",
    "Statevector",
    "apply_gate",
    "expectation",
    "run_circuit",
    "sample_expectation",
    "zero_state",
]
