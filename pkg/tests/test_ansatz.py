"""Ansatz builders: structure, binding, equivariance, Hamiltonian faithfulness."""

import itertools

import numpy as np
import pytest

from qrlforge import ansatz, qsim
from qrlforge.ansatz import (
    AnsatzSpec,
    ParamSet,
    bind,
    build_cost_hamiltonian_knapsack,
    build_graph_equivariant,
    build_hardware_efficient,
    compile_program,
    graph_features,
    knapsack_phase_features,
    pair_feature_index,
)
from qrlforge.qsim.gates import LambdaTimesFeature, Theta, ThetaTimesFeature


def run_spec(spec, params, features):
    gates = bind(spec, params, features)
    st = qsim.run_circuit(spec.n_qubits, gates)
    return np.array([qsim.expectation(st, o) for o in spec.observables])


class TestHardwareEfficient:
    def test_three_blocks_per_layer(self):
        spec = build_hardware_efficient(3, 1, 2)
        kinds = [g.kind for g in spec.gates]
        assert kinds == ["RX"] * 3 + ["RY", "RZ"] * 3 + ["CZ"] * 3

    def test_counts(self):
        spec = build_hardware_efficient(3, 1, 2)
        assert spec.n_lambda == 3
        assert spec.n_theta == 6
        assert sum(1 for g in spec.gates if g.kind == "CZ") == 3
        assert len(spec.observables) == 2

    def test_single_qubit_degenerate_ring(self):
        spec = build_hardware_efficient(1, 2, 1)
        assert all(g.kind != "CZ" for g in spec.gates)
        assert spec.n_theta == 4
        assert spec.n_lambda == 2

    def test_two_qubit_single_cz(self):
        spec = build_hardware_efficient(2, 1, 2)
        assert sum(1 for g in spec.gates if g.kind == "CZ") == 1

    def test_too_many_actions(self):
        with pytest.raises(ValueError):
            build_hardware_efficient(2, 1, 3)

    def test_parameter_bookkeeping(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            n_qubits = int(rng.integers(1, 6))
            n_layers = int(rng.integers(1, 4))
            spec = build_hardware_efficient(n_qubits, n_layers, n_qubits)
            theta_refs = {g.binding.index for g in spec.gates if isinstance(g.binding, Theta)}
            lam_refs = {g.binding.index for g in spec.gates if isinstance(g.binding, LambdaTimesFeature)}
            assert theta_refs == set(range(spec.n_theta))
            assert lam_refs == set(range(spec.n_lambda))


class TestBind:
    def test_zero_features_encoding_is_identity(self):
        spec = build_hardware_efficient(3, 2, 3)
        rng = np.random.default_rng(4)
        params = ParamSet(rng.uniform(-np.pi, np.pi, spec.n_theta), rng.uniform(0.5, 2, spec.n_lambda), np.ones(3))
        with_encoding = run_spec(spec, params, np.zeros(3))
        stripped = AnsatzSpec(
            spec.n_qubits,
            tuple(g for g in spec.gates if not isinstance(g.binding, LambdaTimesFeature)),
            spec.observables,
            spec.n_theta,
            0,
            spec.n_features,
        )
        without = run_spec(stripped, ParamSet(params.theta, np.zeros(0), params.w), np.zeros(3))
        np.testing.assert_allclose(with_encoding, without, atol=1e-12)

    def test_unit_scale_passthrough(self):
        spec = build_hardware_efficient(3, 1, 2)
        params = ParamSet(np.zeros(spec.n_theta), np.ones(spec.n_lambda), np.ones(2))
        gates = bind(spec, params, np.array([np.pi, 0.0, 0.0]))
        assert gates[0].kind == "RX"
        assert gates[0].angle == pytest.approx(np.pi)

    def test_feature_length_mismatch(self):
        spec = build_hardware_efficient(3, 1, 2)
        params = ParamSet(np.zeros(spec.n_theta), np.ones(spec.n_lambda), np.ones(2))
        with pytest.raises(ValueError):
            bind(spec, params, np.zeros(2))

    def test_param_length_mismatch(self):
        spec = build_hardware_efficient(3, 1, 2)
        with pytest.raises(ValueError):
            bind(spec, ParamSet(np.zeros(1), np.ones(spec.n_lambda), np.ones(2)), np.zeros(3))

    def test_program_matches_bind_path(self):
        rng = np.random.default_rng(8)
        spec = build_hardware_efficient(4, 2, 4)
        program = compile_program(spec)
        params = ParamSet(
            rng.uniform(-np.pi, np.pi, spec.n_theta), rng.uniform(0.5, 2, spec.n_lambda), np.ones(4)
        )
        features = rng.uniform(-np.pi, np.pi, 4)
        via_bind = run_spec(spec, params, features)
        via_program = program.forward(params.theta, params.lam, features)
        np.testing.assert_allclose(via_bind, via_program, atol=1e-12)


class TestGraphEquivariant:
    def test_counts(self):
        spec = build_graph_equivariant(4, 1)
        assert spec.n_theta == 2
        assert len(spec.observables) == 4

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            build_graph_equivariant(1, 1)

    def test_symmetric_square_all_equal(self):
        # four nodes arranged with fully symmetric pairwise weights
        n = 4
        spec = build_graph_equivariant(n, 2)
        d = np.ones((n, n)) - np.eye(n)
        feats = graph_features(d, np.ones(n))
        params = ParamSet(np.array([0.7, -0.4, 0.3, 0.9]), np.zeros(0), np.ones(n))
        values = run_spec(spec, params, feats)
        assert np.max(np.abs(values - values[0])) < 1e-10

    @pytest.mark.parametrize("n_layers", [1, 2])
    def test_permutation_equivariance(self, n_layers):
        rng = np.random.default_rng(17)
        n = 4
        spec = build_graph_equivariant(n, n_layers)
        for trial in range(3):
            d = rng.uniform(0.1, 1.4, size=(n, n))
            d = (d + d.T) / 2
            np.fill_diagonal(d, 0.0)
            avail = np.ones(n)
            if trial == 2:
                avail[1] = 0.0
            theta = rng.uniform(-np.pi, np.pi, spec.n_theta)
            params = ParamSet(theta, np.zeros(0), np.ones(n))
            base = run_spec(spec, params, graph_features(d, avail))
            for perm in itertools.permutations(range(n)):
                p = np.array(perm)
                d_p = d[np.ix_(p, p)]
                permuted = run_spec(spec, params, graph_features(d_p, avail[p]))
                np.testing.assert_allclose(permuted, base[p], atol=1e-10)

    def test_unavailable_node_drops_interactions(self):
        n = 3
        spec = build_graph_equivariant(n, 1)
        d = np.ones((n, n)) - np.eye(n)
        avail = np.array([1.0, 0.0, 1.0])
        params = ParamSet(np.array([0.8, 0.0]), np.zeros(0), np.ones(n))
        gates = bind(spec, params, graph_features(d, avail))
        zz_wires = [g.wires for g in gates if g.kind == "ZZ"]
        assert zz_wires == [(0, 2)]


class TestKnapsackHamiltonian:
    def test_cost_examples(self):
        _, cost = build_cost_hamiltonian_knapsack([2, 3], [1, 2], 2, 10)
        assert cost("11") == pytest.approx(5.0)
        assert cost("00") == pytest.approx(0.0)
        assert cost("01") == pytest.approx(-3.0)

    def test_diagonal_matches_enumeration_oracle(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 10):
            values = rng.uniform(0.1, 1.0, n)
            weights = rng.uniform(0.1, 1.0, n)
            capacity = float(weights.sum() / 2)
            penalty = 2.5
            _, cost = build_cost_hamiltonian_knapsack(values, weights, capacity, penalty)
            diag = cost.diagonal()
            for x in range(1 << n):
                value = 0.0
                weight = 0.0
                for i in range(n):
                    if (x >> (n - 1 - i)) & 1:
                        value += float(values[i])
                        weight += float(weights[i])
                over = weight - capacity
                if over < 0.0:
                    over = 0.0
                expected = -value + penalty * over
                assert diag[x] == expected

    def test_basis_state_expectation_exact(self):
        _, cost = build_cost_hamiltonian_knapsack([2, 3, 1], [1, 2, 2], 2, 10)
        for x in range(8):
            amps = np.zeros(8, dtype=np.complex128)
            amps[x] = 1.0
            assert cost.expectation(amps) == cost(x)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            build_cost_hamiltonian_knapsack([1, 2], [1], 1, 1)

    def test_circuit_runs_and_reads_out(self):
        spec, _ = build_cost_hamiltonian_knapsack([2, 3], [1, 2], 2, 10)
        feats = knapsack_phase_features([2, 3], [1, 2], 2, 10)
        assert feats.size == spec.n_features
        params = ParamSet(np.array([0.2, 0.5]), np.zeros(0), np.ones(3))
        values = run_spec(spec, params, feats)
        assert values.shape == (3,)
        assert np.all(np.abs(values) <= 1 + 1e-12)

    def test_phase_layer_realizes_quadratic_penalty(self):
        # with beta = 0 the circuit is H-wall + diagonal phases; the relative
        # phase of basis state |x> against |0...0> must equal
        # -gamma * (H_quad(x) - H_quad(0)) for the quadratic-penalty cost
        values = [1.5, 0.7, 1.1]
        weights = [0.9, 1.3, 0.4]
        capacity = 1.2
        penalty = 3.0
        n = 3
        spec, _ = build_cost_hamiltonian_knapsack(values, weights, capacity, penalty)
        feats = knapsack_phase_features(values, weights, capacity, penalty)
        gamma = 0.37
        params = ParamSet(np.array([gamma, 0.0]), np.zeros(0), np.ones(n + 1))
        st = qsim.run_circuit(n, bind(spec, params, feats))

        def quad_cost(x):
            xv = [(x >> (n - 1 - i)) & 1 for i in range(n)]
            total_v = sum(v * b for v, b in zip(values, xv))
            total_w = sum(w * b for w, b in zip(weights, xv))
            return -total_v + penalty * (total_w - capacity) ** 2

        base = st.amplitudes[0]
        for x in range(1, 1 << n):
            rel = np.angle(st.amplitudes[x] / base)
            want = -gamma * (quad_cost(x) - quad_cost(0))
            diff = (rel - want + np.pi) % (2 * np.pi) - np.pi
            assert abs(diff) < 1e-10


class TestPairIndex:
    def test_upper_triangle_layout(self):
        n = 4
        seen = [pair_feature_index(i, j, n) for i in range(n) for j in range(i + 1, n)]
        assert seen == list(range(6))
        assert pair_feature_index(2, 1, n) == pair_feature_index(1, 2, n)
