"""
Penalty QUBO encodings of TSP and QAP and their diagonal Ising form.

Variable layout is row-major over the n x n assignment matrix:
    TSP: x[i*n + p] = 1  <=>  city i is visited at tour position p
    QAP: x[u*n + l] = 1  <=>  facility u is placed at location l
Variable k is qubit k; bitstring character k is its value.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from config import Config
from models.hamiltonian import (
    Bits, DecodedSolution, IsingHamiltonian, QuboModel, bits_to_array, bits_to_index, index_to_bits
)
from models.instance import ProblemInstance, QapInstance, TspInstance, validate_permutation
from services.cost_model import solution_cost
from utils.error_handler import SizeLimitError, ValidationError

logger = logging.getLogger(__name__)

# Coefficients below this magnitude are treated as cancelled
_ZERO_TOL = 1e-12


def _check_penalty(value: float, name: str) -> float:
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"penalty {name} must be a positive real, got {value}")
    return float(value)


def _add_one_hot_penalties(model: QuboModel, n: int, weight: float) -> None:
    """
    Add weight * (1 - sum x)^2 for every row and every column group.
    Expanded: +weight offset, -weight per variable, +2*weight per pair.
    """
    groups = [[i * n + p for p in range(n)] for i in range(n)]
    groups += [[i * n + p for i in range(n)] for p in range(n)]
    for group in groups:
        model.offset += weight
        for a, var in enumerate(group):
            model.add_linear(var, -weight)
            for other in group[a + 1:]:
                model.add_quadratic(var, other, 2 * weight)


def _with_penalties(objective: QuboModel, weight: float) -> QuboModel:
    n = objective.n
    model = QuboModel(
        num_vars=objective.num_vars,
        linear=dict(objective.linear),
        quadratic=dict(objective.quadratic),
        offset=objective.offset,
        penalty=weight,
        n=n,
        objective=objective,
    )
    _add_one_hot_penalties(model, n, weight)
    return model


def encode_tsp(inst: TspInstance, A: float) -> QuboModel:
    """
    TSP objective sum_{i!=j} d_ij sum_p x_ip x_j,(p+1 mod n) plus
    A-weighted one-hot penalties on every position and every city.

    Args:
        inst: TSP instance with n >= 2
        A: Penalty weight

    Returns:
        QuboModel over n^2 variables; `.objective` holds the penalty-free part
    """
    A = _check_penalty(A, 'A')
    n = inst.n
    if n < 2:
        raise ValidationError(f"TSP encoding needs n >= 2, got {n}")

    objective = QuboModel(num_vars=n * n, n=n)
    for i in range(n):
        for j in range(n):
            if i == j or inst.d[i, j] == 0:
                continue
            for p in range(n):
                objective.add_quadratic(i * n + p, j * n + (p + 1) % n, float(inst.d[i, j]))

    model = _with_penalties(objective, A)
    logger.debug(
        f"Encoded {inst!r}: {model.num_vars} vars, {len(model.linear)} linear, "
        f"{len(model.quadratic)} quadratic, A={A}"
    )
    return model


def encode_qap(inst: QapInstance, B: float) -> QuboModel:
    """
    QAP objective sum_{u,m,l,k} b_um c_lk x_ul x_mk plus B-weighted
    one-hot penalties on every facility and every location.
    """
    B = _check_penalty(B, 'B')
    n = inst.n
    if n < 2:
        raise ValidationError(f"QAP encoding needs n >= 2, got {n}")

    objective = QuboModel(num_vars=n * n, n=n)
    for u in range(n):
        for m in range(n):
            if u == m or inst.b[u, m] == 0:
                continue
            for l in range(n):
                for k in range(n):
                    if l == k or inst.c[l, k] == 0:
                        continue
                    objective.add_quadratic(u * n + l, m * n + k, float(inst.b[u, m] * inst.c[l, k]))

    model = _with_penalties(objective, B)
    logger.debug(
        f"Encoded {inst!r}: {model.num_vars} vars, {len(model.quadratic)} quadratic, B={B}"
    )
    return model


def default_penalty(inst: ProblemInstance) -> float:
    """
    Penalty strictly above the largest feasible objective value, so every
    infeasible state lies above every feasible one.
    """
    n = inst.n
    if isinstance(inst, TspInstance):
        return float(n * inst.d.max() + 1)
    return float(n * n * inst.b.max() * inst.c.max() + 1)


def encode(inst: ProblemInstance, penalty: Optional[float] = None) -> QuboModel:
    """Encode either problem kind; penalty defaults to default_penalty(inst)."""
    weight = default_penalty(inst) if penalty is None else penalty
    if isinstance(inst, TspInstance):
        return encode_tsp(inst, weight)
    return encode_qap(inst, weight)


def qubo_eval(q: QuboModel, bits: Bits) -> float:
    return q.evaluate(bits)


def qubo_to_ising(q: QuboModel) -> IsingHamiltonian:
    """
    Substitute x_k = (1 - Z_k) / 2.

    a x_k        -> a/2 - a/2 Z_k
    q x_i x_j    -> q/4 (1 - Z_i - Z_j + Z_i Z_j)
    """
    constant = q.offset
    local = np.zeros(q.num_vars)
    coupling = {}

    for var, coeff in q.linear.items():
        constant += coeff / 2
        local[var] -= coeff / 2
    for (i, j), coeff in q.quadratic.items():
        constant += coeff / 4
        local[i] -= coeff / 4
        local[j] -= coeff / 4
        coupling[(i, j)] = coupling.get((i, j), 0.0) + coeff / 4

    terms = [(float(local[k]), (k,)) for k in range(q.num_vars) if abs(local[k]) > _ZERO_TOL]
    terms += [(c, pair) for pair, c in sorted(coupling.items()) if abs(c) > _ZERO_TOL]
    return IsingHamiltonian(terms=tuple(terms), constant=constant, num_qubits=q.num_vars)


def build_model(inst: ProblemInstance, penalty: Optional[float] = None) -> Tuple[QuboModel, IsingHamiltonian]:
    """Encode an instance and convert it to its Ising Hamiltonian."""
    qubo = encode(inst, penalty)
    hamiltonian = qubo_to_ising(qubo)
    logger.info(
        f"Built Hamiltonian for {inst!r}: {hamiltonian.num_qubits} qubits, "
        f"{len(hamiltonian.terms)} terms, penalty {qubo.penalty}"
    )
    return qubo, hamiltonian


def energy(h: IsingHamiltonian, bits: Bits) -> float:
    """constant + sum coeff * prod (1 - 2 bit_q) over each support."""
    x = bits_to_array(bits, h.num_qubits)
    spins = 1 - 2 * x.astype(np.int64)
    value = h.constant
    for coeff, support in h.terms:
        value += coeff * int(np.prod(spins[list(support)]))
    return float(value)


def decode(bits: Bits, n: int, inst: ProblemInstance) -> DecodedSolution:
    """
    Read bits as an n x n matrix, rows = cities/facilities, columns =
    positions/locations. Feasible iff it is a permutation matrix.
    """
    if inst.n != n:
        raise ValidationError(f"decode size {n} does not match instance size {inst.n}")
    matrix = bits_to_array(bits, n * n).reshape(n, n)
    if not (np.all(matrix.sum(axis=0) == 1) and np.all(matrix.sum(axis=1) == 1)):
        return DecodedSolution(feasible=False)

    if isinstance(inst, TspInstance):
        # column p holds the city visited at position p
        pi = tuple(int(i) for i in matrix.argmax(axis=0))
    else:
        pi = tuple(int(l) for l in matrix.argmax(axis=1))
    return DecodedSolution(feasible=True, pi=pi, cost=solution_cost(inst, pi))


def permutation_to_bits(pi: Sequence[int], inst: ProblemInstance) -> str:
    """Permutation-matrix bitstring that decode() maps back to pi."""
    n = inst.n
    perm = validate_permutation(pi, n)
    bits = ['0'] * (n * n)
    if isinstance(inst, TspInstance):
        for p, city in enumerate(perm):
            bits[city * n + p] = '1'
    else:
        for facility, location in enumerate(perm):
            bits[facility * n + location] = '1'
    return ''.join(bits)


def ground_state_bruteforce(h: IsingHamiltonian) -> Tuple[str, float]:
    """
    Exhaustive minimum over all 2^q basis states; ties go to the
    lexicographically smallest bitstring.

    Raises:
        SizeLimitError: more than Config.GROUND_STATE_MAX_QUBITS qubits
    """
    if h.num_qubits > Config.GROUND_STATE_MAX_QUBITS:
        raise SizeLimitError(
            f"ground-state enumeration is limited to {Config.GROUND_STATE_MAX_QUBITS} qubits",
            limit=Config.GROUND_STATE_MAX_QUBITS, actual=h.num_qubits
        )
    energies = h.diagonal()
    lowest = float(energies.min())
    tol = 1e-9 * max(1.0, abs(lowest))
    candidates = np.flatnonzero(energies <= lowest + tol)
    best = min(index_to_bits(int(i), h.num_qubits) for i in candidates)
    lowest = float(energies[bits_to_index(best)])
    logger.debug(f"Ground state over {h.num_qubits} qubits: {best} energy {lowest} ({len(candidates)} degenerate)")
    return best, lowest
