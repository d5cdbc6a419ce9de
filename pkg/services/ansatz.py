"""
Parametrised circuits for the variational solvers.

two_local        RY layer, CX(k, k+1) for ascending k, repeated reps
                 times, then a final RY layer
real_amplitudes  same layers with the CX chain running in reverse
qaoa             H on every qubit, then p blocks of cost unitary
                 exp(-i gamma_j H) and mixer exp(-i beta_j sum X);
                 parameters ordered (gamma_1..gamma_p, beta_1..beta_p)
"""
import logging
from typing import Optional

from models.circuit import Circuit, GateKind, ParameterRef
from models.hamiltonian import IsingHamiltonian
from models.results import AnsatzSpec
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)


def _rotation_layer(circuit: Circuit, first_index: int) -> int:
    for q in range(circuit.width):
        circuit.append(GateKind.RY, (q,), ParameterRef(first_index + q))
    return first_index + circuit.width


def _entangling_chain(circuit: Circuit, reverse: bool) -> None:
    links = range(circuit.width - 1)
    for k in (reversed(links) if reverse else links):
        circuit.append(GateKind.CX, (k, k + 1))


def _hardware_efficient(spec: AnsatzSpec) -> Circuit:
    circuit = Circuit(width=spec.width, name=spec.form)
    reverse = spec.form == 'real_amplitudes'
    index = 0
    for _ in range(spec.reps_or_p):
        index = _rotation_layer(circuit, index)
        _entangling_chain(circuit, reverse)
    _rotation_layer(circuit, index)
    return circuit


def _qaoa(spec: AnsatzSpec, h: IsingHamiltonian) -> Circuit:
    p = spec.reps_or_p
    circuit = Circuit(width=spec.width, num_parameters=2 * p, name='qaoa')
    for q in range(spec.width):
        circuit.append(GateKind.H, (q,))

    for j in range(p):
        for coeff, support in h.terms:
            # exp(-i gamma c Z) = RZ(2 gamma c), exp(-i gamma c ZZ) = RZZ(2 gamma c)
            angle = ParameterRef(j, 2.0 * coeff)
            if len(support) == 1:
                circuit.append(GateKind.RZ, support, angle)
            else:
                circuit.append(GateKind.RZZ, support, angle)
        for q in range(spec.width):
            circuit.append(GateKind.RX, (q,), ParameterRef(p + j, 2.0))
    return circuit


def build_ansatz(spec: AnsatzSpec, h: Optional[IsingHamiltonian] = None) -> Circuit:
    """
    Build the variational circuit for spec.

    Args:
        spec: Form, reps/p and width
        h: Cost Hamiltonian (required for qaoa)

    Returns:
        Circuit with spec.num_parameters symbolic slots
    """
    if spec.form == 'qaoa':
        if h is None:
            raise ValidationError("the QAOA ansatz needs the cost Hamiltonian")
        if h.num_qubits != spec.width:
            raise ValidationError(
                f"Hamiltonian has {h.num_qubits} qubits, ansatz width is {spec.width}"
            )
        if h.locality() > 2:
            raise ValidationError(f"cost unitary supports at most 2-local terms, got {h.locality()}")
        circuit = _qaoa(spec, h)
    else:
        circuit = _hardware_efficient(spec)

    if circuit.num_parameters != spec.num_parameters:
        raise ValidationError(
            f"{spec.form} circuit has {circuit.num_parameters} parameters, expected {spec.num_parameters}"
        )
    logger.debug(f"Built {spec.form} ansatz: width {spec.width}, {len(circuit)} gates, "
                 f"{circuit.num_parameters} parameters")
    return circuit
