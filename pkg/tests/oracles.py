"""Independent reference implementations used to check the fast paths.

Everything here is deliberately naive: dense Kronecker-product matrices,
central finite differences, and exhaustive enumeration.  None of it shares
code with the package's kernels.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def gate_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    if kind == "RX":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[np.exp(-1j * angle / 2), 0], [0, np.exp(1j * angle / 2)]], dtype=complex)
    if kind == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if kind == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if kind == "ZZ":
        zz = np.kron(PAULI["Z"], PAULI["Z"])
        w, v = np.linalg.eigh(zz)
        return v @ np.diag(np.exp(-1j * angle / 2 * w)) @ v.conj().T
    raise ValueError(kind)


def embed(matrix: np.ndarray, wires: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Lift a 1- or 2-qubit matrix to the full register, qubit 0 = MSB."""
    dim = 1 << n_qubits
    full = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n_qubits) if q not in wires]
    k = len(wires)
    for col in range(dim):
        bits = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        sub_in = 0
        for w in wires:
            sub_in = (sub_in << 1) | bits[w]
        for sub_out in range(1 << k):
            amp = matrix[sub_out, sub_in]
            if amp == 0:
                continue
            out_bits = list(bits)
            for pos, w in enumerate(wires):
                out_bits[w] = (sub_out >> (k - 1 - pos)) & 1
            row = 0
            for q in range(n_qubits):
                row = (row << 1) | out_bits[q]
            full[row, col] += amp
    return full


def simulate_dense(n_qubits: int, gates) -> np.ndarray:
    """gates: iterable of (kind, wires, angle). Returns the final state."""
    state = np.zeros(1 << n_qubits, dtype=complex)
    state[0] = 1.0
    for kind, wires, angle in gates:
        state = embed(gate_matrix(kind, angle), tuple(wires), n_qubits) @ state
    return state


def pauli_string_matrix(pauli_string: dict[int, str], n_qubits: int) -> np.ndarray:
    op = np.array([[1.0]], dtype=complex)
    for q in range(n_qubits):
        op = np.kron(op, PAULI.get(pauli_string.get(q, "I"), I2) if q in pauli_string else I2)
    return op


def dense_expectation(state: np.ndarray, pauli_string: dict[int, str], coefficient: float = 1.0) -> float:
    n_qubits = int(round(math.log2(state.size)))
    op = pauli_string_matrix(pauli_string, n_qubits)
    return float(coefficient * np.real(np.vdot(state, op @ state)))


def central_difference(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Jacobian of vector-valued f at x via central differences."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(f(x), dtype=float))
    jac = np.zeros((f0.size, x.size))
    for j in range(x.size):
        xp = x.copy()
        xp[j] += h
        xm = x.copy()
        xm[j] -= h
        fp = np.atleast_1d(np.asarray(f(xp), dtype=float))
        fm = np.atleast_1d(np.asarray(f(xm), dtype=float))
        jac[:, j] = (fp - fm) / (2 * h)
    return jac


def brute_force_tsp(coords: np.ndarray) -> float:
    """Length of the shortest closed tour starting and ending at city 0."""
    n = len(coords)
    best = math.inf
    for perm in itertools.permutations(range(1, n)):
        order = (0,) + perm + (0,)
        length = 0.0
        for a, b in zip(order[:-1], order[1:]):
            length += float(np.linalg.norm(coords[a] - coords[b]))
        best = min(best, length)
    return best


def brute_force_knapsack(values, weights, capacity) -> float:
    """Best total value over subsets that fit the capacity."""
    n = len(values)
    best = 0.0
    for mask in range(1 << n):
        value = weight = 0.0
        for i in range(n):
            if (mask >> i) & 1:
                value += values[i]
                weight += weights[i]
        if weight <= capacity:
            best = max(best, value)
    return best
