"""Precompiled circuit programs: the hot path used by quantum agents.

A ``CircuitProgram`` bakes a symbolic gate list into flat arrays once, so
that per-observation work is just a handful of vectorized gathers plus one
kernel call.  Trainable angles are indexed against the flat parameter layout
``concat(theta, lambda)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import UnsupportedBindingError
from . import backend
from .counting import add_executions
from .gates import (
    KIND_CODES,
    ROTATION_KINDS,
    ConstAngle,
    Feature,
    GateOp,
    LambdaTimesFeature,
    Theta,
    ThetaTimesFeature,
    validate_wires,
)
from .statevector import Observable, observables_to_arrays


class CircuitProgram:
    """Executable form of a gate list with symbolic bindings."""

    def __init__(
        self,
        n_qubits: int,
        gates: Sequence[GateOp],
        observables: Sequence[Observable],
        n_theta: int,
        n_lambda: int,
        n_features: int,
    ) -> None:
        self.n_qubits = n_qubits
        self.n_theta = n_theta
        self.n_lambda = n_lambda
        self.n_features = n_features
        self.n_params = n_theta + n_lambda
        n = len(gates)
        self.kinds = np.empty(n, dtype=np.int32)
        self.q0 = np.zeros(n, dtype=np.int32)
        self.q1 = np.zeros(n, dtype=np.int32)
        self.base_angles = np.zeros(n, dtype=np.float64)
        self.param_idx = np.full(n, -1, dtype=np.int32)
        theta_pos: list[int] = []
        theta_idx: list[int] = []
        prod_pos: list[int] = []
        prod_param: list[int] = []
        prod_feat: list[int] = []
        feat_pos: list[int] = []
        feat_idx: list[int] = []
        feat_mult: list[float] = []
        rule_pos: list[int] = []
        rule_feat: list[int] = []
        for i, gate in enumerate(gates):
            validate_wires(gate, n_qubits)
            self.kinds[i] = KIND_CODES[gate.kind]
            self.q0[i] = gate.wires[0]
            if len(gate.wires) > 1:
                self.q1[i] = gate.wires[1]
            b = gate.binding
            if b is not None and not isinstance(b, ConstAngle) and gate.kind not in ROTATION_KINDS:
                raise UnsupportedBindingError(f"trainable binding on non-rotation gate {gate.kind}")
            if isinstance(b, ConstAngle):
                self.base_angles[i] = b.angle
            elif isinstance(b, Theta):
                theta_pos.append(i)
                theta_idx.append(b.index)
                self.param_idx[i] = b.index
            elif isinstance(b, ThetaTimesFeature):
                prod_pos.append(i)
                prod_param.append(b.index)
                prod_feat.append(b.feature)
                self.param_idx[i] = b.index
            elif isinstance(b, LambdaTimesFeature):
                prod_pos.append(i)
                prod_param.append(n_theta + b.index)
                prod_feat.append(b.feature)
                self.param_idx[i] = n_theta + b.index
            elif isinstance(b, Feature):
                feat_pos.append(i)
                feat_idx.append(b.index)
                feat_mult.append(b.multiplier)
            for f in gate.enabled_if:
                rule_pos.append(i)
                rule_feat.append(f)
        self.theta_pos = np.array(theta_pos, dtype=np.intp)
        self.theta_idx = np.array(theta_idx, dtype=np.intp)
        self.prod_pos = np.array(prod_pos, dtype=np.intp)
        self.prod_param = np.array(prod_param, dtype=np.intp)
        self.prod_feat = np.array(prod_feat, dtype=np.intp)
        self.feat_pos = np.array(feat_pos, dtype=np.intp)
        self.feat_idx = np.array(feat_idx, dtype=np.intp)
        self.feat_mult = np.array(feat_mult, dtype=np.float64)
        self.rule_pos = np.array(rule_pos, dtype=np.intp)
        self.rule_feat = np.array(rule_feat, dtype=np.intp)
        self.has_rules = len(rule_pos) > 0
        self.base_enabled = np.ones(n, dtype=np.uint8)
        self.base_mult = np.ones(n, dtype=np.float64)
        self.obs_arrays = observables_to_arrays(list(observables), n_qubits)
        self.n_observables = len(observables)

    def resolve(
        self, theta: np.ndarray, lam: np.ndarray, features: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Concrete (angles, enabled, param_mult) for one input."""
        angles = self.base_angles.copy()
        if self.theta_pos.size:
            angles[self.theta_pos] = theta[self.theta_idx]
        if self.prod_pos.size:
            params = np.concatenate([theta, lam]) if self.n_lambda else theta
            angles[self.prod_pos] = params[self.prod_param] * features[self.prod_feat]
        if self.feat_pos.size:
            angles[self.feat_pos] = features[self.feat_idx] * self.feat_mult
        enabled = self.base_enabled.copy()
        if self.has_rules:
            alive = (features[self.rule_feat] != 0.0).astype(np.uint8)
            np.minimum.at(enabled, self.rule_pos, alive)
        mult = self.base_mult.copy()
        if self.prod_pos.size:
            mult[self.prod_pos] = features[self.prod_feat]
        return angles, enabled, mult

    def run(self, theta: np.ndarray, lam: np.ndarray, features: np.ndarray) -> np.ndarray:
        """Final statevector amplitudes; counts one circuit execution."""
        angles, enabled, _ = self.resolve(theta, lam, features)
        state = backend.run_circuit(self.n_qubits, self.kinds, self.q0, self.q1, angles, enabled)
        add_executions(1)
        return state

    def forward(self, theta: np.ndarray, lam: np.ndarray, features: np.ndarray) -> np.ndarray:
        """Observable expectation values; counts one circuit execution."""
        state = self.run(theta, lam, features)
        return backend.expectations(state, self.n_qubits, *self.obs_arrays)

    def gradient(self, theta: np.ndarray, lam: np.ndarray, features: np.ndarray) -> np.ndarray:
        """d <O_k> / d params as a (n_observables, n_theta + n_lambda) matrix.

        Costs 2 * (enabled trainable gate occurrences) circuit executions.
        """
        angles, enabled, mult = self.resolve(theta, lam, features)
        grad, runs = backend.parameter_shift(
            self.n_qubits,
            self.kinds,
            self.q0,
            self.q1,
            angles,
            enabled,
            self.param_idx,
            mult,
            self.n_params,
            *self.obs_arrays,
        )
        add_executions(runs)
        return grad

    def occurrences(self, features: np.ndarray | None = None) -> int:
        """Enabled trainable gate occurrences; gradient cost is twice this."""
        if features is None or not self.has_rules:
            return int(np.sum(self.param_idx >= 0))
        _, enabled, _ = self.resolve(
            np.zeros(self.n_theta), np.zeros(self.n_lambda), np.asarray(features, dtype=np.float64)
        )
        return int(np.sum((self.param_idx >= 0) & (enabled == 1)))
