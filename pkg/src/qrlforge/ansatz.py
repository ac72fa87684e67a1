"""Circuit families used as RL function approximators.

Three builders:

* ``build_hardware_efficient`` -- layered data-reuploading circuit: per layer
  an encoding block RX(lambda * feature), a variational block RY/RZ, and a CZ
  ring entangler; single-qubit Z readouts, one per action.
* ``build_graph_equivariant`` -- node-permutation-equivariant circuit for
  weighted graphs: H wall, then per layer ZZ(gamma_l * d_ij) over edges and
  a shared RX(beta_l) mixer.  Edge interactions drop out at bind time when
  either endpoint is marked unavailable.
* ``build_cost_hamiltonian_knapsack`` -- QAOA-style alternation whose phase
  layer realizes the quadratic-penalty knapsack cost; also returns an exact
  classical evaluator of the (slack-free, max-penalty) cost function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qsim.gates import (
    ConstAngle,
    Feature,
    GateOp,
    LambdaTimesFeature,
    ResolvedGate,
    Theta,
    ThetaTimesFeature,
)
from .qsim.program import CircuitProgram
from .qsim.statevector import Observable


@dataclass(frozen=True)
class AnsatzSpec:
    """An ordered symbolic gate program with its readout observables."""

    n_qubits: int
    gates: tuple[GateOp, ...]
    observables: tuple[Observable, ...]
    n_theta: int
    n_lambda: int
    n_features: int
    name: str = "ansatz"

    def __post_init__(self) -> None:
        if len(self.observables) < 1:
            raise ValueError("an ansatz needs at least one observable")
        for gate in self.gates:
            b = gate.binding
            if isinstance(b, (Theta, ThetaTimesFeature)) and b.index >= self.n_theta:
                raise ValueError(f"theta index {b.index} out of range (n_theta={self.n_theta})")
            if isinstance(b, LambdaTimesFeature) and b.index >= self.n_lambda:
                raise ValueError(f"lambda index {b.index} out of range (n_lambda={self.n_lambda})")
            refs = []
            if isinstance(b, (ThetaTimesFeature, LambdaTimesFeature)):
                refs.append(b.feature)
            if isinstance(b, Feature):
                refs.append(b.index)
            refs.extend(gate.enabled_if)
            for f in refs:
                if f >= self.n_features:
                    raise ValueError(f"feature index {f} out of range (n_features={self.n_features})")


@dataclass
class ParamSet:
    """Concrete parameters for one AnsatzSpec: theta, lambda scales, output weights."""

    theta: np.ndarray
    lam: np.ndarray
    w: np.ndarray

    def check(self, spec: AnsatzSpec) -> None:
        if len(self.theta) != spec.n_theta:
            raise ValueError(f"theta has {len(self.theta)} entries, spec needs {spec.n_theta}")
        if len(self.lam) != spec.n_lambda:
            raise ValueError(f"lambda has {len(self.lam)} entries, spec needs {spec.n_lambda}")
        if len(self.w) != len(spec.observables):
            raise ValueError(f"w has {len(self.w)} entries, spec has {len(spec.observables)} observables")


def initial_params(spec: AnsatzSpec, rng: np.random.Generator) -> ParamSet:
    """Random theta in [-pi, pi), unit lambda scales, unit output weights."""
    return ParamSet(
        theta=rng.uniform(-np.pi, np.pi, size=spec.n_theta),
        lam=np.ones(spec.n_lambda),
        w=np.ones(len(spec.observables)),
    )


def _cz_ring(n_qubits: int) -> list[GateOp]:
    if n_qubits < 2:
        return []
    if n_qubits == 2:
        return [GateOp("CZ", (0, 1))]
    return [GateOp("CZ", (q, (q + 1) % n_qubits)) for q in range(n_qubits)]


def build_hardware_efficient(n_qubits: int, n_layers: int, n_actions: int) -> AnsatzSpec:
    """Data-reuploading hardware-efficient circuit with one Z readout per action."""
    if n_qubits < 1 or n_layers < 1 or n_actions < 1:
        raise ValueError("n_qubits, n_layers and n_actions must be positive")
    if n_actions > n_qubits:
        raise ValueError(f"n_actions={n_actions} exceeds n_qubits={n_qubits}")
    gates: list[GateOp] = []
    t = 0
    s = 0
    for _ in range(n_layers):
        for q in range(n_qubits):
            gates.append(GateOp("RX", (q,), LambdaTimesFeature(s, q)))
            s += 1
        for q in range(n_qubits):
            gates.append(GateOp("RY", (q,), Theta(t)))
            t += 1
            gates.append(GateOp("RZ", (q,), Theta(t)))
            t += 1
        gates.extend(_cz_ring(n_qubits))
    observables = tuple(Observable({q: "Z"}) for q in range(n_actions))
    return AnsatzSpec(
        n_qubits=n_qubits,
        gates=tuple(gates),
        observables=observables,
        n_theta=t,
        n_lambda=s,
        n_features=n_qubits,
        name="hardware_efficient",
    )


def pair_feature_index(i: int, j: int, n: int) -> int:
    """Position of unordered pair (i, j) in the flattened upper triangle."""
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def build_graph_equivariant(n_nodes: int, n_layers: int) -> AnsatzSpec:
    """Permutation-equivariant circuit over a weighted graph.

    Features: the n(n-1)/2 upper-triangular edge weights followed by n
    per-node availability bits.  Shared trainables per layer: gamma_l scaling
    every edge interaction and beta_l for the RX mixer; n_theta = 2*n_layers.
    """
    if n_nodes < 2:
        raise ValueError(f"graph ansatz needs at least 2 nodes, got {n_nodes}")
    if n_layers < 1:
        raise ValueError("n_layers must be positive")
    n_pairs = n_nodes * (n_nodes - 1) // 2
    gates: list[GateOp] = [GateOp("H", (q,)) for q in range(n_nodes)]
    for layer in range(n_layers):
        gamma = 2 * layer
        beta = 2 * layer + 1
        for i in range(n_nodes):
            for j in range(i + 1, n_nodes):
                feat = pair_feature_index(i, j, n_nodes)
                avail_i = n_pairs + i
                avail_j = n_pairs + j
                gates.append(
                    GateOp("ZZ", (i, j), ThetaTimesFeature(gamma, feat), enabled_if=(avail_i, avail_j))
                )
        for q in range(n_nodes):
            gates.append(GateOp("RX", (q,), Theta(beta)))
    observables = tuple(Observable({q: "Z"}) for q in range(n_nodes))
    return AnsatzSpec(
        n_qubits=n_nodes,
        gates=tuple(gates),
        observables=observables,
        n_theta=2 * n_layers,
        n_lambda=0,
        n_features=n_pairs + n_nodes,
        name="graph_equivariant",
    )


def graph_features(distances: np.ndarray, availability: np.ndarray) -> np.ndarray:
    """Flatten a symmetric distance matrix plus availability bits into the
    feature layout the graph ansatz expects."""
    n = distances.shape[0]
    upper = [distances[i, j] for i in range(n) for j in range(i + 1, n)]
    return np.concatenate([np.asarray(upper, dtype=np.float64), np.asarray(availability, dtype=np.float64)])


class KnapsackCost:
    """Exact evaluator of the slack-free penalty cost on computational basis states.

    cost(x) = -sum(v_i x_i) + penalty * max(0, sum(w_i x_i) - capacity)

    Bit i of a basis state corresponds to item i (qubit i, MSB-first index).
    Scalar arithmetic runs left to right in plain Python floats so that
    independent re-evaluation reproduces results bit for bit.
    """

    def __init__(self, values: Sequence[float], weights: Sequence[float], capacity: float, penalty: float) -> None:
        self.values = [float(v) for v in values]
        self.weights = [float(w) for w in weights]
        self.capacity = float(capacity)
        self.penalty = float(penalty)
        self.n_items = len(self.values)

    def _bits(self, x) -> list[int]:
        n = self.n_items
        if isinstance(x, str):
            if len(x) != n:
                raise ValueError(f"bitstring length {len(x)} != {n}")
            return [int(c) for c in x]
        if isinstance(x, (int, np.integer)):
            return [(int(x) >> (n - 1 - i)) & 1 for i in range(n)]
        bits = [int(b) for b in x]
        if len(bits) != n:
            raise ValueError(f"bit sequence length {len(bits)} != {n}")
        return bits

    def __call__(self, x) -> float:
        bits = self._bits(x)
        value = 0.0
        weight = 0.0
        for i in range(self.n_items):
            if bits[i]:
                value += self.values[i]
                weight += self.weights[i]
        overshoot = weight - self.capacity
        if overshoot < 0.0:
            overshoot = 0.0
        return -value + self.penalty * overshoot

    def diagonal(self) -> np.ndarray:
        """<x|H_C|x> for every basis index x, as a 2**n vector."""
        return np.array([self(x) for x in range(1 << self.n_items)], dtype=np.float64)

    def expectation(self, amplitudes: np.ndarray) -> float:
        probs = np.abs(amplitudes) ** 2
        return float(probs @ self.diagonal())


def knapsack_phase_features(
    values: Sequence[float], weights: Sequence[float], capacity: float, penalty: float
) -> np.ndarray:
    """Phase-layer coefficients of the quadratic-penalty knapsack Hamiltonian.

    H_phase = -sum v_i x_i + penalty * (sum w_i x_i - capacity)^2 expands over
    z_i = 1 - 2 x_i into single-Z terms c_i and pair terms c_ij; the returned
    vector holds [2*c_i for each item] ++ [2*c_ij for each pair i<j], which
    are exactly the RZ and ZZ angles per unit of the trainable gamma.
    """
    v = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if v.shape != w.shape:
        raise ValueError(f"values and weights lengths differ: {v.size} vs {w.size}")
    n = v.size
    a0 = w.sum() / 2.0 - capacity
    linear = v - 2.0 * penalty * a0 * w
    pairs = [penalty * w[i] * w[j] for i in range(n) for j in range(i + 1, n)]
    return np.concatenate([linear, np.asarray(pairs, dtype=np.float64)])


def build_cost_hamiltonian_knapsack(
    values: Sequence[float], weights: Sequence[float], capacity: float, penalty: float,
    n_layers: int = 1,
) -> tuple[AnsatzSpec, KnapsackCost]:
    """QAOA-style circuit over the knapsack cost Hamiltonian.

    Each layer applies RZ(gamma_l * f_i) per item and ZZ(gamma_l * f_ij) per
    pair, with the f coefficients from ``knapsack_phase_features``, then an
    RX(beta_l) mixer on every qubit; an H wall prepares the uniform start.
    Readouts are Z per item plus a global Z-parity head.  The returned
    evaluator scores basis states with the max() form of the penalty (the
    circuit's quadratic form only shapes phases, not the reported cost).
    """
    v = list(values)
    w = list(weights)
    if len(v) != len(w):
        raise ValueError(f"values and weights lengths differ: {len(v)} vs {len(w)}")
    if len(v) < 1:
        raise ValueError("knapsack needs at least one item")
    if capacity <= 0 or penalty <= 0:
        raise ValueError("capacity and penalty must be positive")
    if n_layers < 1:
        raise ValueError("n_layers must be positive")
    n = len(v)
    n_pairs = n * (n - 1) // 2
    gates: list[GateOp] = [GateOp("H", (q,)) for q in range(n)]
    for layer in range(n_layers):
        gamma = 2 * layer
        beta = 2 * layer + 1
        for i in range(n):
            gates.append(GateOp("RZ", (i,), ThetaTimesFeature(gamma, i)))
        for i in range(n):
            for j in range(i + 1, n):
                gates.append(GateOp("ZZ", (i, j), ThetaTimesFeature(gamma, n + pair_feature_index(i, j, n))))
        for q in range(n):
            gates.append(GateOp("RX", (q,), Theta(beta)))
    observables = tuple(Observable({q: "Z"}) for q in range(n)) + (
        Observable({q: "Z" for q in range(n)}),
    )
    spec = AnsatzSpec(
        n_qubits=n,
        gates=tuple(gates),
        observables=observables,
        n_theta=2 * n_layers,
        n_lambda=0,
        n_features=n + n_pairs,
        name="cost_hamiltonian_knapsack",
    )
    return spec, KnapsackCost(v, w, capacity, penalty)


def bind(spec: AnsatzSpec, params: ParamSet, features: np.ndarray | Sequence[float]) -> list[ResolvedGate]:
    """Resolve every symbolic binding to a concrete angle.

    The returned gates carry parameter provenance against the flat layout
    ``concat(theta, lambda)``; gates whose ``enabled_if`` features are zero
    are skipped.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.size != spec.n_features:
        raise ValueError(f"features has {features.size} entries, spec needs {spec.n_features}")
    params.check(spec)
    out: list[ResolvedGate] = []
    for gate in spec.gates:
        if gate.enabled_if and any(features[f] == 0.0 for f in gate.enabled_if):
            continue
        b = gate.binding
        if b is None:
            out.append(ResolvedGate(gate.kind, gate.wires))
        elif isinstance(b, ConstAngle):
            out.append(ResolvedGate(gate.kind, gate.wires, angle=b.angle))
        elif isinstance(b, Theta):
            out.append(
                ResolvedGate(gate.kind, gate.wires, angle=float(params.theta[b.index]), param_index=b.index)
            )
        elif isinstance(b, ThetaTimesFeature):
            out.append(
                ResolvedGate(
                    gate.kind,
                    gate.wires,
                    angle=float(params.theta[b.index] * features[b.feature]),
                    param_index=b.index,
                    multiplier=float(features[b.feature]),
                )
            )
        elif isinstance(b, LambdaTimesFeature):
            out.append(
                ResolvedGate(
                    gate.kind,
                    gate.wires,
                    angle=float(params.lam[b.index] * features[b.feature]),
                    param_index=spec.n_theta + b.index,
                    multiplier=float(features[b.feature]),
                )
            )
        else:  # Feature
            out.append(ResolvedGate(gate.kind, gate.wires, angle=float(features[b.index] * b.multiplier)))
    return out


def compile_program(spec: AnsatzSpec) -> CircuitProgram:
    """Bake the spec into flat arrays for the fast kernel path."""
    return CircuitProgram(
        spec.n_qubits, spec.gates, spec.observables, spec.n_theta, spec.n_lambda, spec.n_features
    )
