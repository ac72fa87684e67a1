"""Gate vocabulary, symbolic parameter bindings, and resolved gate records.

Qubit ordering convention used everywhere in this package: qubit 0 is the
MOST significant bit of the basis-state index.  For two qubits the basis
order is |00>, |01>, |10>, |11> with the left bit belonging to qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UnsupportedBindingError, WireError

H = "H"
RX = "RX"
RY = "RY"
RZ = "RZ"
CZ = "CZ"
CNOT = "CNOT"
ZZ = "ZZ"

GATE_KINDS = frozenset({H, RX, RY, RZ, CZ, CNOT, ZZ})
ROTATION_KINDS = frozenset({RX, RY, RZ, ZZ})
TWO_QUBIT_KINDS = frozenset({CZ, CNOT, ZZ})

# integer codes shared with the simulation kernels
KIND_CODES = {H: 0, RX: 1, RY: 2, RZ: 3, CZ: 4, CNOT: 5, ZZ: 6}


@dataclass(frozen=True)
class ConstAngle:
    """Fixed rotation angle in radians."""

    angle: float


@dataclass(frozen=True)
class Theta:
    """Angle taken directly from the variational parameter vector."""

    index: int


@dataclass(frozen=True)
class ThetaTimesFeature:
    """Angle = theta[index] * features[feature]; used by shared-parameter ansatzes."""

    index: int
    feature: int


@dataclass(frozen=True)
class LambdaTimesFeature:
    """Angle = lambda[index] * features[feature]; the trainable input-scaling binding."""

    index: int
    feature: int


@dataclass(frozen=True)
class Feature:
    """Angle = features[index] * multiplier, with no trainable part."""

    index: int
    multiplier: float = 1.0


Binding = ConstAngle | Theta | ThetaTimesFeature | LambdaTimesFeature | Feature


@dataclass(frozen=True)
class GateOp:
    """One gate with a symbolic angle binding.

    ``wires`` holds one index for single-qubit kinds and two distinct indices
    for CZ/CNOT/ZZ.  H, CZ and CNOT carry no binding; the rotation kinds carry
    exactly one.  ``enabled_if`` lists feature indices that must all be
    nonzero at bind time for the gate to be emitted (used by the
    graph-equivariant ansatz to drop interactions with unavailable nodes).
    """

    kind: str
    wires: tuple[int, ...]
    binding: Binding | None = None
    enabled_if: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.wires) != expected:
            raise ValueError(f"{self.kind} takes {expected} wire(s), got {self.wires}")
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"{self.kind} wires must be distinct, got {self.wires}")
        if any(w < 0 for w in self.wires):
            raise WireError(f"negative wire index in {self.wires}")
        if self.kind in ROTATION_KINDS:
            if self.binding is None:
                raise ValueError(f"{self.kind} requires an angle binding")
        elif self.binding is not None:
            raise UnsupportedBindingError(f"{self.kind} carries no angle binding")


@dataclass(frozen=True, slots=True)
class ResolvedGate:
    """A gate whose angle is a concrete number, ready for simulation.

    ``param_index`` >= 0 records which entry of the flat trainable vector the
    angle came from and ``multiplier`` its chain-rule factor (d angle / d
    parameter); -1 marks angles with no trainable dependence.
    """

    kind: str
    wires: tuple[int, ...]
    angle: float = 0.0
    param_index: int = -1
    multiplier: float = 1.0


def validate_wires(gate: GateOp | ResolvedGate, n_qubits: int) -> None:
    for w in gate.wires:
        if not 0 <= w < n_qubits:
            raise WireError(f"wire {w} out of range for {n_qubits} qubit(s)")


def gates_to_arrays(
    gates: list[ResolvedGate] | tuple[ResolvedGate, ...], n_qubits: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pack resolved gates into the flat arrays the kernels consume.

    Returns (kinds, q0, q1, angles, enabled, param_idx, param_mult).
    """
    n = len(gates)
    kinds = np.empty(n, dtype=np.int32)
    q0 = np.zeros(n, dtype=np.int32)
    q1 = np.zeros(n, dtype=np.int32)
    angles = np.zeros(n, dtype=np.float64)
    enabled = np.ones(n, dtype=np.uint8)
    param_idx = np.full(n, -1, dtype=np.int32)
    param_mult = np.ones(n, dtype=np.float64)
    for i, g in enumerate(gates):
        validate_wires(g, n_qubits)
        if g.param_index >= 0 and g.kind not in ROTATION_KINDS:
            raise UnsupportedBindingError(
                f"parameter {g.param_index} bound to non-rotation gate {g.kind}"
            )
        kinds[i] = KIND_CODES[g.kind]
        q0[i] = g.wires[0]
        if len(g.wires) > 1:
            q1[i] = g.wires[1]
        angles[i] = g.angle
        param_idx[i] = g.param_index
        param_mult[i] = g.multiplier
    return kinds, q0, q1, angles, enabled, param_idx, param_mult
