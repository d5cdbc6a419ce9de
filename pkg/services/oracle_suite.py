"""
Oracle-equivalence suite behind `copq verify`.

Every check compares a fast path against an exhaustive or dense
reference on small instances (n <= 4, width <= 4).
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from models.circuit import BASIS_GATES, Circuit, GateKind
from models.hamiltonian import bits_to_index, index_to_bits
from models.instance import ProblemInstance
from services.branch_and_bound import bnb_solve
from services.cost_model import brute_force_optimum
from services.instance_loader import random_instance
from services.ising_encoder import (
    build_model, decode, ground_state_bruteforce, permutation_to_bits, qubo_eval
)
from services.statevector_simulator import circuit_unitary, run, states_equal
from services.transpiler import transpile_to_basis
from utils.error_handler import ValidationError, VerificationError

logger = logging.getLogger(__name__)

MAX_VERIFY_SIZE = 4
_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


def random_circuit(width: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    """Random bound circuit over every gate kind."""
    kinds = list(GateKind)
    if width < 2:
        kinds = [k for k in kinds if k.n_qubits == 1]
    circuit = Circuit(width=width)
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        qubits = tuple(int(q) for q in rng.choice(width, size=kind.n_qubits, replace=False))
        theta = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind.parametric else None
        circuit.append(kind, qubits, theta)
    return circuit


def _instances(n_max: int, seed: int) -> List[ProblemInstance]:
    return [random_instance(kind, n, seed + n) for kind in ('tsp', 'qap') for n in range(2, n_max + 1)]


def check_spectrum(n_max: int, seed: int) -> CheckResult:
    """Ising energy equals the QUBO value on every basis state (n <= 3)."""
    for inst in _instances(min(n_max, 3), seed):
        qubo, h = build_model(inst)
        energies = h.diagonal()
        for index in range(energies.size):
            bits = index_to_bits(index, h.num_qubits)
            expected = qubo_eval(qubo, bits)
            if abs(energies[index] - expected) > _TOL * max(1.0, abs(expected)):
                return CheckResult('spectrum', False, f"{inst!r} state {bits}: {energies[index]} != {expected}")
    return CheckResult('spectrum', True)


def penalty_gap(inst: ProblemInstance, samples: Optional[int] = None, seed: int = 0) -> float:
    """
    Lowest infeasible energy minus highest feasible energy under the
    default penalty; positive when the penalty dominates.

    With samples=None every basis state is classified. Otherwise the
    infeasible side is every single-bit flip of a permutation matrix plus
    `samples` uniformly drawn basis states.
    """
    _, h = build_model(inst)
    energies = h.diagonal()
    width = h.num_qubits
    feasible = np.array([
        bits_to_index(permutation_to_bits(pi, inst)) for pi in itertools.permutations(range(inst.n))
    ])
    if samples is None:
        candidates = np.arange(energies.size)
    else:
        rng = np.random.default_rng(seed)
        flips = (feasible[:, None] ^ (1 << np.arange(width))[None, :]).ravel()
        candidates = np.unique(np.concatenate([flips, rng.integers(energies.size, size=samples)]))
    infeasible = [
        int(i) for i in candidates if not decode(index_to_bits(int(i), width), inst.n, inst).feasible
    ]
    return float(energies[infeasible].min() - energies[feasible].max())


def check_penalty_dominance(n_max: int, seed: int, samples: int = 4096) -> CheckResult:
    """Infeasible states lie above feasible ones: exhaustive up to n=3, sampled at n=4."""
    for inst in _instances(n_max, seed):
        exhaustive = inst.n <= 3
        gap = penalty_gap(inst, None if exhaustive else samples, seed + inst.n)
        if gap <= 0:
            scope = 'exhaustive' if exhaustive else f"{samples} samples"
            return CheckResult(
                'penalty_dominance', False, f"{inst!r} ({scope}): penalty gap {gap:.6g} is not positive"
            )
    return CheckResult('penalty_dominance', True)


def check_ground_state(n_max: int, seed: int) -> CheckResult:
    """Hamiltonian ground state decodes to a brute-force optimal permutation."""
    for inst in _instances(n_max, seed):
        _, h = build_model(inst)
        bits, lowest = ground_state_bruteforce(h)
        decoded = decode(bits, inst.n, inst)
        _, optimum = brute_force_optimum(inst)
        if not decoded.feasible or abs(decoded.cost - optimum) > _TOL * max(1.0, optimum):
            return CheckResult('ground_state', False, f"{inst!r}: ground state {bits} vs optimum {optimum}")
        if abs(lowest - optimum) > _TOL * max(1.0, optimum):
            return CheckResult('ground_state', False, f"{inst!r}: ground energy {lowest} vs optimum {optimum}")
    return CheckResult('ground_state', True)


def check_decode_roundtrip(n_max: int, seed: int) -> CheckResult:
    inst = random_instance('tsp', n_max, seed)
    for pi in np.array([np.random.default_rng(seed + k).permutation(n_max) for k in range(10)]):
        decoded = decode(permutation_to_bits(pi, inst), n_max, inst)
        if decoded.pi != tuple(int(v) for v in pi):
            return CheckResult('decode_roundtrip', False, f"{tuple(pi)} decoded as {decoded.pi}")
    return CheckResult('decode_roundtrip', True)


def check_bnb(n_max: int, seed: int, seeds_per_size: int = 5) -> CheckResult:
    for kind in ('tsp', 'qap'):
        for n in range(3, n_max + 1):
            for k in range(seeds_per_size):
                inst = random_instance(kind, n, seed + 100 * n + k)
                _, optimum = brute_force_optimum(inst)
                result = bnb_solve(inst)
                if abs(result.cost - optimum) > _TOL * max(1.0, optimum):
                    return CheckResult('bnb', False, f"{inst!r}: BNB {result.cost} vs optimum {optimum}")
    return CheckResult('bnb', True)


def check_transpiler(seed: int, n_circuits: int = 25) -> CheckResult:
    rng = np.random.default_rng(seed)
    for k in range(n_circuits):
        circuit = random_circuit(int(rng.integers(1, 5)), int(rng.integers(1, 21)), rng)
        basis = transpile_to_basis(circuit)
        if any(g.kind not in BASIS_GATES for g in basis.gates):
            return CheckResult('transpiler', False, f"circuit {k}: non-basis gate left")
        if not states_equal(run(circuit), run(basis), _TOL):
            return CheckResult('transpiler', False, f"circuit {k}: statevectors differ")
        if not states_equal(circuit_unitary(circuit), circuit_unitary(basis), _TOL):
            return CheckResult('transpiler', False, f"circuit {k}: unitaries differ")
    return CheckResult('transpiler', True)


def run_oracle_suite(n_max: int = MAX_VERIFY_SIZE, seed: int = 0) -> List[CheckResult]:
    """
    Run every oracle check.

    Args:
        n_max: Largest instance size, 2..4
        seed: Base seed for instances and random circuits
    """
    if not 2 <= n_max <= MAX_VERIFY_SIZE:
        raise ValidationError(f"verify sizes must lie in 2..{MAX_VERIFY_SIZE}, got {n_max}")

    checks: List[Callable[[], CheckResult]] = [
        lambda: check_spectrum(n_max, seed),
        lambda: check_penalty_dominance(n_max, seed),
        lambda: check_ground_state(n_max, seed),
        lambda: check_decode_roundtrip(n_max, seed),
        lambda: check_bnb(n_max, seed),
        lambda: check_transpiler(seed),
    ]
    results = []
    for check in checks:
        result = check()
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"verify {result.name}: {'pass' if result.passed else 'FAIL'} {result.detail}")
        results.append(result)
    return results


def verify(n_max: int = MAX_VERIFY_SIZE, seed: int = 0) -> List[CheckResult]:
    """run_oracle_suite, raising VerificationError when any check fails."""
    results = run_oracle_suite(n_max, seed)
    failed = [r for r in results if not r.passed]
    if failed:
        raise VerificationError(
            f"{len(failed)} oracle check(s) failed: {', '.join(r.name for r in failed)}",
            details='; '.join(r.detail for r in failed)
        )
    return results
