"""
Dense statevector simulator.

Amplitude index i encodes the basis state with bit_q = (i >> q) & 1, so
qubit 0 is the least-significant bit. Viewed as a tensor of shape
[2] * width, qubit q lives on axis width - 1 - q.
"""
import logging
from typing import Optional, Sequence

import numpy as np
import psutil

from config import Config
from models.circuit import Circuit, Gate, GateKind, ShotDistribution
from models.hamiltonian import IsingHamiltonian, index_to_bits
from utils.error_handler import (
    BindingError, CapabilityError, SizeLimitError, UnsupportedGateError, ValidationError
)

logger = logging.getLogger(__name__)

# Amplitudes are complex128
Statevector = np.ndarray

_NORM_TOL = 1e-9

_FIXED_MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    GateKind.ID: np.eye(2, dtype=complex),
    # basis |control target>, control most significant
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _rzz(theta: float) -> np.ndarray:
    lo, hi = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    return np.diag([lo, hi, hi, lo])


_PARAMETRIC_MATRICES = {
    GateKind.RZ: _rz,
    GateKind.RY: _ry,
    GateKind.RX: _rx,
    GateKind.RZZ: _rzz,
}


def gate_matrix(gate: Gate) -> np.ndarray:
    """
    Unitary of a bound gate. Two-qubit matrices are written in the basis
    |q0 q1> with gate.qubits[0] as the most significant bit.
    """
    if gate.kind in _FIXED_MATRICES:
        return _FIXED_MATRICES[gate.kind]
    if gate.kind in _PARAMETRIC_MATRICES:
        if gate.is_symbolic:
            raise BindingError(f"{gate.kind.label} angle {gate.theta} is unbound")
        return _PARAMETRIC_MATRICES[gate.kind](gate.theta)
    raise UnsupportedGateError(gate.kind.label)


def _apply_matrix(tensor: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], width: int) -> np.ndarray:
    k = len(qubits)
    axes = [width - 1 - q for q in qubits]
    op = matrix.reshape([2] * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _width_of(state: Statevector) -> int:
    width = int(state.size).bit_length() - 1
    if state.ndim != 1 or state.size != 2 ** width or width < 1:
        raise ValidationError(f"statevector length {state.size} is not a power of two")
    return width


def zero_state(width: int) -> Statevector:
    state = np.zeros(2 ** width, dtype=complex)
    state[0] = 1.0
    return state


def check_capacity(width: int) -> None:
    """
    Refuse widths above the configured cap or beyond available memory.

    Raises:
        SizeLimitError: width above min(COPQ_MAX_QUBITS, hard cap)
        CapabilityError: not enough free memory for the amplitudes
    """
    cap = min(Config.max_qubits(), Config.HARD_MAX_QUBITS)
    if width > cap:
        raise SizeLimitError(
            f"simulator width {width} exceeds the cap of {cap} qubits (set COPQ_MAX_QUBITS to raise it)",
            limit=cap, actual=width
        )
    needed = 16 * 2 ** width
    available = psutil.virtual_memory().available
    if needed > available:
        raise CapabilityError(
            f"statevector of {width} qubits needs {needed / 2 ** 30:.2f} GiB",
            details=f"{available / 2 ** 30:.2f} GiB available"
        )


def apply_gate(state: Statevector, g: Gate) -> Statevector:
    """Return the state transformed by the gate's unitary."""
    width = _width_of(state)
    if max(g.qubits) >= width:
        raise ValidationError(f"{g.kind.label} on qubits {g.qubits} outside a {width}-qubit state")
    tensor = state.reshape([2] * width)
    return _apply_matrix(tensor, gate_matrix(g), g.qubits, width).reshape(-1)


def run(circ: Circuit, bindings: Optional[Sequence[float]] = None) -> Statevector:
    """
    Evolve |0...0> through the circuit.

    Raises:
        BindingError: a symbolic angle has no value
        SizeLimitError: width above the simulator cap
    """
    check_capacity(circ.width)
    bound = circ.bind(bindings) if circ.is_parameterized else circ
    width = circ.width
    tensor = zero_state(width).reshape([2] * width)
    for gate in bound.gates:
        if gate.kind == GateKind.ID:
            continue
        tensor = _apply_matrix(tensor, gate_matrix(gate), gate.qubits, width)
    state = np.ascontiguousarray(tensor.reshape(-1))

    norm = float(np.vdot(state, state).real)
    if abs(norm - 1.0) > _NORM_TOL:
        logger.warning(f"Statevector norm drifted to {norm} after {len(bound)} gates")
    return state


def probabilities(state: Statevector) -> np.ndarray:
    probs = np.abs(state) ** 2
    return probs / probs.sum()


def _sample_counts(state: Statevector, shots: int, seed: int) -> np.ndarray:
    if shots < 1:
        raise ValidationError(f"shots must be at least 1, got {shots}")
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, probabilities(state))


def sample(state: Statevector, shots: int, seed: int) -> ShotDistribution:
    """Multinomial draw of `shots` measurements; deterministic given seed."""
    width = _width_of(state)
    counts = _sample_counts(state, shots, seed)
    observed = np.flatnonzero(counts)
    histogram = {index_to_bits(int(i), width): int(counts[i]) for i in observed}
    return ShotDistribution(counts=histogram, shots=shots, width=width)


def _check_widths(state: Statevector, h: IsingHamiltonian) -> None:
    width = _width_of(state)
    if width != h.num_qubits:
        raise ValidationError(f"state has {width} qubits, Hamiltonian has {h.num_qubits}")


def exact_expectation(state: Statevector, h: IsingHamiltonian) -> float:
    """<psi|H|psi> for a diagonal Hamiltonian."""
    _check_widths(state, h)
    return float(probabilities(state) @ h.diagonal())


def estimate_expectation(circ: Circuit, bindings: Optional[Sequence[float]], h: IsingHamiltonian,
                         shots: int, seed: int) -> float:
    """Shot-averaged energy of the circuit output; exact for basis-state outputs."""
    state = run(circ, bindings)
    _check_widths(state, h)
    counts = _sample_counts(state, shots, seed)
    return float(counts @ h.diagonal()) / shots


def circuit_unitary(circ: Circuit, bindings: Optional[Sequence[float]] = None) -> np.ndarray:
    """Dense 2^w x 2^w unitary; column j is the output for basis input j."""
    width = circ.width
    if width > Config.UNITARY_MAX_QUBITS:
        raise SizeLimitError(
            f"dense unitaries are limited to {Config.UNITARY_MAX_QUBITS} qubits",
            limit=Config.UNITARY_MAX_QUBITS, actual=width
        )
    bound = circ.bind(bindings) if circ.is_parameterized else circ
    dim = 2 ** width
    # trailing axis carries the input basis index
    tensor = np.eye(dim, dtype=complex).reshape([2] * width + [dim])
    for gate in bound.gates:
        tensor = _apply_matrix(tensor, gate_matrix(gate), gate.qubits, width)
    return tensor.reshape(dim, dim)


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Equality up to a global phase (works for states and unitaries)."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        return False
    pivot = int(np.argmax(np.abs(a)))
    if abs(a[pivot]) < tol:
        return bool(np.allclose(a, b, atol=tol, rtol=0))
    if abs(b[pivot]) < tol:
        return False
    phase = b[pivot] / a[pivot]
    phase /= abs(phase)
    return bool(np.allclose(a * phase, b, atol=tol, rtol=0))
