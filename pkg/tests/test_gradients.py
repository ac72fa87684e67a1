"""Parameter-shift gradients against analytic values and finite differences."""

import numpy as np
import pytest

from qrlforge import qsim
from qrlforge.errors import UnsupportedBindingError
from qrlforge.qsim import ExecutionCounter, Observable, ResolvedGate, counting
from qrlforge.qsim import backend

from oracles import central_difference


def ry_builder(p):
    return [ResolvedGate("RY", (0,), angle=float(p[0]), param_index=0)]


def hardware_efficient_builder(n_qubits, n_layers, inputs):
    """theta layout: per layer, RY+RZ per qubit, then the lambda scales."""
    n_theta = 2 * n_qubits * n_layers
    n_lambda = n_qubits * n_layers

    def build(p):
        gates = []
        t = 0
        s = 0
        for _ in range(n_layers):
            for q in range(n_qubits):
                gates.append(
                    ResolvedGate(
                        "RX",
                        (q,),
                        angle=float(p[n_theta + s] * inputs[q]),
                        param_index=n_theta + s,
                        multiplier=float(inputs[q]),
                    )
                )
                s += 1
            for q in range(n_qubits):
                gates.append(ResolvedGate("RY", (q,), angle=float(p[t]), param_index=t))
                t += 1
                gates.append(ResolvedGate("RZ", (q,), angle=float(p[t]), param_index=t))
                t += 1
            if n_qubits >= 2:
                edges = [(q, (q + 1) % n_qubits) for q in range(n_qubits)]
                if n_qubits == 2:
                    edges = [(0, 1)]
                for a, b in edges:
                    gates.append(ResolvedGate("CZ", (a, b)))
        return gates

    return build, n_theta + n_lambda


class TestParameterShift:
    def test_ry_analytic(self):
        grad = qsim.parameter_shift_gradient(1, ry_builder, [0.7], [Observable({0: "Z"})])
        assert grad[0, 0] == pytest.approx(-np.sin(0.7), abs=1e-12)

    def test_ry_extremum(self):
        grad = qsim.parameter_shift_gradient(1, ry_builder, [0.0], [Observable({0: "Z"})])
        assert grad[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_multiplier_chain_rule(self):
        # angle = m * theta, so d<Z>/d theta = -m sin(m theta)
        m = 1.7

        def build(p):
            return [ResolvedGate("RY", (0,), angle=float(m * p[0]), param_index=0, multiplier=m)]

        theta = 0.4
        grad = qsim.parameter_shift_gradient(1, build, [theta], [Observable({0: "Z"})])
        assert grad[0, 0] == pytest.approx(-m * np.sin(m * theta), abs=1e-10)

    def test_repeated_parameter_sums_occurrences(self):
        # RY(theta) twice is RY(2 theta): d/d theta cos(2 theta) = -2 sin(2 theta)
        def build(p):
            return [
                ResolvedGate("RY", (0,), angle=float(p[0]), param_index=0),
                ResolvedGate("RY", (0,), angle=float(p[0]), param_index=0),
            ]

        theta = 0.3
        grad = qsim.parameter_shift_gradient(1, build, [theta], [Observable({0: "Z"})])
        assert grad[0, 0] == pytest.approx(-2 * np.sin(2 * theta), abs=1e-10)

    def test_random_circuit_matches_finite_difference(self):
        rng = np.random.default_rng(99)
        inputs = rng.uniform(-np.pi, np.pi, size=4)
        build, n_params = hardware_efficient_builder(4, 2, inputs)
        params = rng.uniform(-np.pi, np.pi, size=n_params)
        observables = [Observable({q: "Z"}) for q in range(2)]
        analytic = qsim.parameter_shift_gradient(4, build, params, observables)

        def f(p):
            st = qsim.run_circuit(4, build(p))
            return np.array([qsim.expectation(st, o) for o in observables])

        numeric = central_difference(f, params, h=1e-4)
        np.testing.assert_allclose(analytic, numeric, atol=1e-6)

    def test_zz_gate_gradient(self):
        def build(p):
            return [
                ResolvedGate("H", (0,)),
                ResolvedGate("H", (1,)),
                ResolvedGate("ZZ", (0, 1), angle=float(p[0]), param_index=0),
                ResolvedGate("RX", (0,), angle=0.3),
            ]

        params = np.array([0.8])
        obs = [Observable({0: "Y", 1: "Z"})]
        analytic = qsim.parameter_shift_gradient(2, build, params, obs)

        def f(p):
            st = qsim.run_circuit(2, build(p))
            return np.array([qsim.expectation(st, obs[0])])

        numeric = central_difference(f, params)
        np.testing.assert_allclose(analytic, numeric, atol=1e-8)

    def test_counter_linearity(self):
        rng = np.random.default_rng(1)
        inputs = rng.uniform(-1, 1, size=3)
        build, n_params = hardware_efficient_builder(3, 2, inputs)
        params = rng.uniform(-np.pi, np.pi, size=n_params)
        counter = ExecutionCounter()
        with counting(counter):
            qsim.parameter_shift_gradient(3, build, params, [Observable({0: "Z"})])
        # every parameter occurs exactly once here
        assert counter.count == 2 * n_params
        with counting(counter):
            qsim.run_circuit(3, build(params))
        assert counter.count == 2 * n_params + 1

    def test_non_rotation_binding_rejected(self):
        def build(p):
            return [ResolvedGate("H", (0,), param_index=0)]

        with pytest.raises(UnsupportedBindingError):
            qsim.parameter_shift_gradient(1, build, [0.1], [Observable({0: "Z"})])


@pytest.mark.skipif(len(qsim.available_backends()) < 2, reason="compiled kernels not built")
class TestBackendParity:
    def test_backends_agree(self):
        impls = qsim.available_backends()
        py, cy = impls["python"], impls["cython"]
        rng = np.random.default_rng(5)
        inputs = rng.uniform(-np.pi, np.pi, size=4)
        build, n_params = hardware_efficient_builder(4, 3, inputs)
        params = rng.uniform(-np.pi, np.pi, size=n_params)
        from qrlforge.qsim.gates import gates_to_arrays
        from qrlforge.qsim.statevector import observables_to_arrays

        gates = build(params)
        arrays = gates_to_arrays(gates, 4)
        obs = observables_to_arrays([Observable({q: "Z"}) for q in range(4)] + [Observable({0: "X", 1: "Y"})], 4)
        st_py = py.run_circuit(4, *arrays[:5])
        st_cy = cy.run_circuit(4, *arrays[:5])
        np.testing.assert_allclose(st_py, st_cy, atol=1e-12)
        e_py = py.expectations(st_py, 4, *obs)
        e_cy = cy.expectations(st_cy, 4, *obs)
        np.testing.assert_allclose(e_py, e_cy, atol=1e-12)
        g_py, r_py = py.parameter_shift(4, *arrays, n_params, *obs)
        g_cy, r_cy = cy.parameter_shift(4, *arrays, n_params, *obs)
        assert r_py == r_cy
        np.testing.assert_allclose(g_py, g_cy, atol=1e-12)

    def test_selected_backend_reported(self):
        assert backend.BACKEND_NAME in ("cython", "python")
