"""Dense statevector simulation with Pauli-string expectation values.

Convention (stated once, used everywhere): qubit 0 is the most significant
bit of the basis-state index, so CZ acting on |11> of a 2-qubit register
flips the sign of amplitude index 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import CapacityError, WireError
from . import backend
from .counting import add_executions
from .gates import ResolvedGate, gates_to_arrays

MAX_QUBITS = 24

_PAULI_LETTERS = frozenset("XYZ")


@dataclass
class Statevector:
    """Amplitudes of an ``n_qubits`` register; length is exactly 2**n_qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class Observable:
    """A weighted Pauli string: ``pauli_string`` maps qubit index -> X/Y/Z.

    Qubits absent from the map carry the identity.  The expectation of any
    observable with |coefficient| = 1 lies in [-1, 1].
    """

    pauli_string: Mapping[int, str]
    coefficient: float = 1.0

    def __post_init__(self) -> None:
        for q, p in self.pauli_string.items():
            if p not in _PAULI_LETTERS:
                raise ValueError(f"unknown Pauli letter {p!r} on qubit {q}")
            if q < 0:
                raise WireError(f"negative qubit index {q}")

    def masks(self, n_qubits: int) -> tuple[int, int, int]:
        """(flip_mask, phase_mask, n_y) for the MSB-first bit layout."""
        flip = 0
        phase = 0
        ny = 0
        for q, p in self.pauli_string.items():
            if q >= n_qubits:
                raise WireError(f"observable qubit {q} out of range for {n_qubits} qubit(s)")
            bit = 1 << (n_qubits - 1 - q)
            if p in ("X", "Y"):
                flip |= bit
            if p in ("Z", "Y"):
                phase |= bit
            if p == "Y":
                ny += 1
        return flip, phase, ny


def observables_to_arrays(
    observables: Sequence[Observable], n_qubits: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    k = len(observables)
    flips = np.empty(k, dtype=np.int64)
    phases = np.empty(k, dtype=np.int64)
    ycounts = np.empty(k, dtype=np.int32)
    coeffs = np.empty(k, dtype=np.float64)
    for i, obs in enumerate(observables):
        flips[i], phases[i], ycounts[i] = obs.masks(n_qubits)
        coeffs[i] = obs.coefficient
    return flips, phases, ycounts, coeffs


def zero_state(n_qubits: int) -> Statevector:
    """|0...0> on ``n_qubits`` qubits; capped at 24 qubits (2**n amplitudes)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return Statevector(n_qubits, amplitudes)


def apply_gate(state: Statevector, gate: ResolvedGate) -> Statevector:
    """Return a new statevector with one resolved gate applied."""
    arrays = gates_to_arrays([gate], state.n_qubits)
    amplitudes = state.amplitudes.copy()
    backend.apply_circuit_inplace(amplitudes, state.n_qubits, *arrays[:5])
    return Statevector(state.n_qubits, amplitudes)


def run_circuit(n_qubits: int, gates: Sequence[ResolvedGate]) -> Statevector:
    """Fold the gate list over |0...0>; counts as one circuit execution."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    kinds, q0, q1, angles, enabled, _, _ = gates_to_arrays(list(gates), n_qubits)
    amplitudes = backend.run_circuit(n_qubits, kinds, q0, q1, angles, enabled)
    add_executions(1)
    return Statevector(n_qubits, amplitudes)


def expectation(state: Statevector, obs: Observable) -> float:
    """Exact coefficient * <state| P |state> for one Pauli string."""
    flips, phases, ycounts, coeffs = observables_to_arrays([obs], state.n_qubits)
    values = backend.expectations(state.amplitudes, state.n_qubits, flips, phases, ycounts, coeffs)
    return float(values[0])


def _measurement_basis_rotation(obs: Observable, n_qubits: int) -> list[ResolvedGate]:
    rot: list[ResolvedGate] = []
    for q, p in sorted(obs.pauli_string.items()):
        if p == "X":
            rot.append(ResolvedGate("H", (q,)))
        elif p == "Y":
            # S^dagger then H maps the Y eigenbasis onto the Z one; the
            # global phase dropped by RZ(-pi/2) does not affect probabilities
            rot.append(ResolvedGate("RZ", (q,), angle=-np.pi / 2.0))
            rot.append(ResolvedGate("H", (q,)))
    return rot


def sample_expectation(
    state: Statevector, obs: Observable, shots: int, rng: np.random.Generator
) -> float:
    """Unbiased finite-shot estimate of ``expectation(state, obs)``.

    Deterministic for a fixed generator state; the standard error scales as
    1/sqrt(shots).
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    flip, phase, ny = obs.masks(state.n_qubits)
    del phase, ny
    amplitudes = state.amplitudes
    if flip:
        rotation = _measurement_basis_rotation(obs, state.n_qubits)
        arrays = gates_to_arrays(rotation, state.n_qubits)
        amplitudes = amplitudes.copy()
        backend.apply_circuit_inplace(amplitudes, state.n_qubits, *arrays[:5])
    zmask = 0
    for q in obs.pauli_string:
        zmask |= 1 << (state.n_qubits - 1 - q)
    idx = np.arange(amplitudes.size, dtype=np.uint64)
    parity = (np.bitwise_count(idx & np.uint64(zmask)) & np.uint64(1)).astype(bool)
    probs = np.abs(amplitudes) ** 2
    p_plus = float(np.sum(probs[~parity]))
    p_plus = min(max(p_plus, 0.0), 1.0)
    hits = int(rng.binomial(shots, p_plus))
    return obs.coefficient * (2.0 * hits / shots - 1.0)
