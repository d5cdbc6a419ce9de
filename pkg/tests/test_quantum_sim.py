"""
Tests for the statevector simulator, the basis transpiler and the
circuit dump format.
"""
from functools import reduce

import numpy as np
import psutil
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from models.circuit import BASIS_GATES, Circuit, Gate, GateKind, ParameterRef, ShotDistribution
from models.hamiltonian import IsingHamiltonian, bits_to_index
from services.ising_encoder import build_model, energy, ground_state_bruteforce
from services.oracle_suite import random_circuit
from services.statevector_simulator import (
    apply_gate, check_capacity, circuit_unitary, estimate_expectation, exact_expectation,
    gate_matrix, run, sample, states_equal, zero_state
)
from services.transpiler import (
    circuit_metrics, dump_circuit, load_circuit, transpile_to_basis, write_circuit
)
from utils.error_handler import BindingError, CapabilityError, ParseError, SizeLimitError, ValidationError

_I = np.eye(2)


def _embed(gate: Gate, width: int) -> np.ndarray:
    """Dense operator of a gate in the little-endian basis (qubit 0 rightmost in kron order)."""
    matrix = gate_matrix(gate)
    if gate.kind.n_qubits == 1:
        factors = [matrix if q == gate.qubits[0] else _I for q in reversed(range(width))]
        return reduce(np.kron, factors)
    dim = 2 ** width
    a, b = gate.qubits
    op = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bit_a, bit_b = (col >> a) & 1, (col >> b) & 1
        for out in range(4):
            amp = matrix[out, bit_a * 2 + bit_b]
            if amp == 0:
                continue
            new_a, new_b = out >> 1, out & 1
            row = col & ~((1 << a) | (1 << b)) | (new_a << a) | (new_b << b)
            op[row, col] += amp
    return op


def _dense_state(circ: Circuit) -> np.ndarray:
    state = zero_state(circ.width)
    for gate in circ.gates:
        state = _embed(gate, circ.width) @ state
    return state


def _basis(bits: str) -> np.ndarray:
    state = np.zeros(2 ** len(bits), dtype=complex)
    state[bits_to_index(bits)] = 1.0
    return state


class TestGates:
    def test_x_flips(self):
        out = apply_gate(zero_state(1), Gate(GateKind.X, (0,)))
        assert np.allclose(out, [0, 1])

    def test_identity(self):
        state = run(Circuit(2).append(GateKind.H, (0,)).append(GateKind.RY, (1,), 0.3))
        assert np.allclose(apply_gate(state, Gate(GateKind.ID, (1,))), state)

    def test_sx_twice_is_x(self):
        circ = Circuit(1).append(GateKind.SX, (0,)).append(GateKind.SX, (0,))
        assert states_equal(run(circ), [0, 1])

    def test_cx_control_is_first_qubit(self):
        circ = Circuit(3).append(GateKind.X, (2,)).append(GateKind.CX, (2, 0))
        assert states_equal(run(circ), _basis('101'))

    def test_unbound_parameter(self):
        with pytest.raises(BindingError):
            gate_matrix(Gate(GateKind.RZ, (0,), ParameterRef(0)))

    def test_gate_validation(self):
        with pytest.raises(ValidationError):
            Gate(GateKind.CX, (1, 1))
        with pytest.raises(ValidationError):
            Gate(GateKind.RY, (0,))
        with pytest.raises(ValidationError):
            Circuit(2).append(GateKind.X, (2,))


class TestRun:
    def test_empty_circuit(self):
        state = run(Circuit(3))
        assert state[0] == 1 and np.count_nonzero(state) == 1

    def test_uniform_superposition(self):
        circ = Circuit(2).append(GateKind.H, (0,)).append(GateKind.H, (1,))
        assert np.allclose(run(circ), 0.5)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_matches_dense_matrix_product(self, seed):
        rng = np.random.default_rng(seed)
        circ = random_circuit(3, int(rng.integers(1, 11)), rng)
        assert np.allclose(run(circ), _dense_state(circ), atol=1e-10)

    def test_unitary_columns_are_basis_outputs(self):
        rng = np.random.default_rng(4)
        circ = random_circuit(3, 12, rng)
        u = circuit_unitary(circ)
        assert np.allclose(u[:, 0], run(circ), atol=1e-12)
        assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-10)

    def test_binding(self):
        circ = Circuit(1).append(GateKind.RY, (0,), ParameterRef(0, 2.0, 0.1))
        assert circ.num_parameters == 1
        assert np.allclose(run(circ, [0.5]), run(Circuit(1).append(GateKind.RY, (0,), 1.1)))
        with pytest.raises(BindingError):
            run(circ, [])

    def test_width_cap(self, max_qubits):
        max_qubits(4)
        with pytest.raises(SizeLimitError):
            run(Circuit(5))
        run(Circuit(4))

    def test_env_cap_never_exceeds_hard_limit(self, max_qubits):
        max_qubits(40)
        with pytest.raises(SizeLimitError):
            check_capacity(26)

    def test_memory_check(self, max_qubits, monkeypatch):
        max_qubits(25)

        class Tiny:
            available = 1024

        monkeypatch.setattr(psutil, 'virtual_memory', lambda: Tiny())
        with pytest.raises(CapabilityError):
            check_capacity(10)


class TestSample:
    def test_basis_state(self):
        circ = Circuit(3).append(GateKind.X, (0,)).append(GateKind.X, (2,))
        dist = sample(run(circ), 1024, 0)
        assert dist.counts == {'101': 1024}

    def test_deterministic(self):
        state = run(random_circuit(3, 10, np.random.default_rng(1)))
        assert sample(state, 500, 9).counts == sample(state, 500, 9).counts

    def test_uniform_qubit_frequencies(self):
        dist = sample(run(Circuit(1).append(GateKind.H, (0,))), 8192, 3)
        sigma = np.sqrt(8192 * 0.25)
        assert abs(dist.counts['0'] - 4096) < 5 * sigma

    def test_goodness_of_fit(self):
        state = run(random_circuit(2, 8, np.random.default_rng(6)))
        probs = np.abs(state) ** 2
        dist = sample(state, 20000, 12)
        observed = [dist.counts.get(format(i, '02b')[::-1], 0) for i in range(4)]
        keep = probs > 1e-6
        observed = np.array(observed)[keep]
        expected = observed.sum() * probs[keep] / probs[keep].sum()
        _, p_value = stats.chisquare(observed, expected)
        assert p_value > 1e-4

    def test_distribution_validates_counts(self):
        with pytest.raises(ValidationError):
            ShotDistribution(counts={'01': 3}, shots=4, width=2)

    def test_invalid_shots(self):
        with pytest.raises(ValidationError):
            sample(zero_state(2), 0, 0)


class TestExpectation:
    def test_basis_state_equals_energy(self, tsp3):
        _, h = build_model(tsp3)
        bits = '100001010'
        circ = Circuit(9)
        for q, bit in enumerate(bits):
            if bit == '1':
                circ.append(GateKind.X, (q,))
        assert exact_expectation(run(circ), h) == pytest.approx(energy(h, bits))
        assert estimate_expectation(circ, None, h, 7, 0) == pytest.approx(energy(h, bits))

    def test_symmetric_average(self):
        h = IsingHamiltonian(terms=((1.0, (0,)),), constant=0.0, num_qubits=2)
        circ = Circuit(2).append(GateKind.H, (0,)).append(GateKind.H, (1,))
        assert exact_expectation(run(circ), h) == pytest.approx(0.0, abs=1e-12)

    def test_constant_hamiltonian(self):
        h = IsingHamiltonian(terms=(), constant=2.5, num_qubits=2)
        circ = random_circuit(2, 6, np.random.default_rng(0))
        assert estimate_expectation(circ, None, h, 100, 3) == pytest.approx(2.5)

    def test_sampled_estimate_converges(self):
        h = IsingHamiltonian(terms=((0.7, (0,)), (-1.3, (0, 1))), constant=0.2, num_qubits=2)
        circ = random_circuit(2, 8, np.random.default_rng(2))
        state = run(circ)
        exact = exact_expectation(state, h)
        diag = h.diagonal()
        probs = np.abs(state) ** 2
        sigma = np.sqrt((probs @ diag ** 2 - exact ** 2) / 10 ** 6)
        assert abs(estimate_expectation(circ, None, h, 10 ** 6, 5) - exact) <= 3 * sigma + 1e-12

    def test_width_mismatch(self, tsp3):
        _, h = build_model(tsp3)
        with pytest.raises(ValidationError):
            exact_expectation(zero_state(4), h)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_never_below_ground_energy(self, seed):
        h = IsingHamiltonian(
            terms=((1.0, (0,)), (-2.0, (1, 2)), (0.5, (0, 2))), constant=0.1, num_qubits=3
        )
        ground = ground_state_bruteforce(h)[1]
        circ = random_circuit(3, 10, np.random.default_rng(seed))
        assert exact_expectation(run(circ), h) >= ground - 1e-9


class TestTranspiler:
    def test_basis_circuit_unchanged(self):
        circ = Circuit(2).append(GateKind.RZ, (0,), 0.4).append(GateKind.CX, (0, 1))
        assert transpile_to_basis(circ).gates == circ.gates

    @pytest.mark.parametrize('kind', [GateKind.RY, GateKind.RX])
    @given(theta=st.floats(-2 * np.pi, 2 * np.pi))
    def test_single_rotation(self, kind, theta):
        circ = Circuit(1).append(kind, (0,), theta)
        basis = transpile_to_basis(circ)
        assert all(g.kind in BASIS_GATES for g in basis.gates)
        assert states_equal(circuit_unitary(circ), circuit_unitary(basis), 1e-10)

    def test_hadamard(self):
        circ = Circuit(1).append(GateKind.H, (0,))
        assert states_equal(circuit_unitary(circ), circuit_unitary(transpile_to_basis(circ)), 1e-10)

    @given(theta=st.floats(-2 * np.pi, 2 * np.pi))
    def test_rzz(self, theta):
        circ = Circuit(2).append(GateKind.RZZ, (1, 0), theta)
        basis = transpile_to_basis(circ)
        assert basis.count_ops()['CX'] == 2
        assert states_equal(circuit_unitary(circ), circuit_unitary(basis), 1e-10)

    def test_random_circuits(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            circ = random_circuit(int(rng.integers(1, 5)), int(rng.integers(1, 21)), rng)
            basis = transpile_to_basis(circ)
            assert all(g.kind in BASIS_GATES for g in basis.gates)
            assert states_equal(run(circ), run(basis), 1e-9)

    def test_symbolic_angles_stay_symbolic(self):
        circ = Circuit(2).append(GateKind.RY, (0,), ParameterRef(0)).append(GateKind.RZZ, (0, 1), ParameterRef(1, 3.0))
        basis = transpile_to_basis(circ)
        assert basis.num_parameters == 2 and basis.is_parameterized
        values = [0.7, -0.2]
        assert states_equal(run(circ, values), run(basis, values), 1e-10)


class TestMetrics:
    def test_empty(self):
        assert circuit_metrics(Circuit(2)) == (0, 0)

    def test_sequential(self):
        circ = Circuit(1).append(GateKind.X, (0,)).append(GateKind.SX, (0,)).append(GateKind.RZ, (0,), 1.0)
        assert circuit_metrics(circ) == (3, 3)

    def test_parallel(self):
        circ = Circuit(2).append(GateKind.X, (0,)).append(GateKind.X, (1,))
        assert circuit_metrics(circ) == (2, 1)

    def test_identity_ignored(self):
        circ = Circuit(1).append(GateKind.ID, (0,)).append(GateKind.X, (0,))
        assert circuit_metrics(circ) == (1, 1)

    def test_two_qubit_gate_joins_layers(self):
        circ = Circuit(2).append(GateKind.X, (0,)).append(GateKind.X, (0,)).append(GateKind.CX, (0, 1))
        assert circuit_metrics(circ) == (3, 3)


class TestCircuitDump:
    def test_round_trip_with_symbols(self, tmp_path):
        circ = Circuit(3)
        circ.append(GateKind.H, (0,)).append(GateKind.RY, (1,), 1.25).append(GateKind.CX, (0, 2))
        circ.append(GateKind.RZ, (2,), ParameterRef(1, -2.5, 3.0))
        text = dump_circuit(circ)
        assert text.splitlines()[0] == 'CIRCUIT 3 2'
        loaded = load_circuit(text)
        assert loaded.gates == circ.gates and loaded.num_parameters == 2
        path = write_circuit(circ, tmp_path / 'c.txt')
        assert load_circuit(path).gates == circ.gates

    def test_unknown_gate(self):
        with pytest.raises(ParseError) as info:
            load_circuit("CIRCUIT 1 0\nX 0\nFOO 0\n")
        assert info.value.line == 3

    def test_bad_angle(self):
        with pytest.raises(ParseError) as info:
            load_circuit("CIRCUIT 1 0\nRZ 0 abc\n")
        assert (info.value.line, info.value.column) == (2, 6)

    def test_missing_header(self):
        with pytest.raises(ParseError):
            load_circuit("X 0\n")
