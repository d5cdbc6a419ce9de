"""
VQE and QAOA drivers.

A run builds the ansatz, optimises its parameters with SPSA against the
Hamiltonian expectation, samples the optimised circuit and keeps the
most probable feasible bitstring of the final distribution.

All randomness derives from one trial seed through
numpy.random.SeedSequence children, in this order: SPSA perturbations,
cold-start point, objective sampling, final sampling.
"""
import logging
import time
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from models.circuit import Circuit, ShotDistribution
from models.hamiltonian import IsingHamiltonian
from models.instance import ProblemInstance
from models.results import AnsatzSpec, FeasibleResult, SpsaConfig, TrialRecord
from services.ansatz import build_ansatz
from services.ising_encoder import decode
from services.spsa import Objective, spsa_minimize
from services.statevector_simulator import (
    check_capacity, estimate_expectation, exact_expectation, run, sample
)
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)

_SEED_STREAMS = 4


def _derive_seeds(seed: int) -> Tuple[int, int, int, int]:
    children = np.random.SeedSequence(seed).spawn(_SEED_STREAMS)
    spsa_seed, init_seed, eval_seed, final_seed = (int(c.generate_state(1)[0]) for c in children)
    return spsa_seed, init_seed, eval_seed, final_seed


def _initial_point(circuit: Circuit, initial_point: Optional[Sequence[float]], init_seed: int) -> np.ndarray:
    if initial_point is None:
        rng = np.random.default_rng(init_seed)
        return rng.uniform(-np.pi, np.pi, size=circuit.num_parameters)
    theta0 = np.array(initial_point, dtype=float)
    if theta0.shape != (circuit.num_parameters,):
        raise ValidationError(
            f"initial point has {theta0.size} entries, ansatz has {circuit.num_parameters} parameters"
        )
    return theta0


def _make_objective(circuit: Circuit, h: IsingHamiltonian, shots: int,
                    eval_seed: int, exact_objective: bool) -> Objective:
    if exact_objective:
        return lambda theta: exact_expectation(run(circuit, theta), h)

    # a fresh, reproducible sampling seed for every evaluation
    seeds = np.random.default_rng(eval_seed)

    def sampled(theta: np.ndarray) -> float:
        return estimate_expectation(circuit, theta, h, shots, int(seeds.integers(2 ** 32)))

    return sampled


def feasible_output(dist: ShotDistribution, n: int, inst: ProblemInstance) -> FeasibleResult:
    """
    Most probable feasible bitstring of a distribution.

    Candidates are visited by descending count, ties by ascending
    bitstring; the first one that decodes to a permutation wins.

    Returns:
        FeasibleResult, or FeasibleResult.infeasible() when no measured
        bitstring is feasible
    """
    if dist.width != n * n:
        raise ValidationError(f"bitstrings have {dist.width} bits, expected {n * n}")
    for bits, count in sorted(dist.counts.items(), key=lambda item: (-item[1], item[0])):
        decoded = decode(bits, n, inst)
        if decoded.feasible:
            return FeasibleResult(
                feasible=True, best_bits=bits, pi=decoded.pi,
                cost=decoded.cost, probability=count / dist.shots
            )
    return FeasibleResult.infeasible()


def _check_problem(h: IsingHamiltonian, width: int, inst: ProblemInstance, shots: int) -> None:
    if h.num_qubits != width:
        raise ValidationError(f"ansatz width {width} does not match Hamiltonian width {h.num_qubits}")
    if inst.n * inst.n != h.num_qubits:
        raise ValidationError(f"instance of size {inst.n} needs {inst.n ** 2} qubits, Hamiltonian has {h.num_qubits}")
    if shots < 1:
        raise ValidationError(f"shots must be at least 1, got {shots}")
    check_capacity(width)


def _variational_run(method: str, circuit: Circuit, h: IsingHamiltonian, cfg: SpsaConfig, shots: int,
                     initial_point: Optional[Sequence[float]], seed: int, inst: ProblemInstance,
                     exact_objective: bool) -> TrialRecord:
    start = time.perf_counter()
    spsa_seed, init_seed, eval_seed, final_seed = _derive_seeds(seed)

    theta0 = _initial_point(circuit, initial_point, init_seed)
    objective = _make_objective(circuit, h, shots, eval_seed, exact_objective)
    theta, value, history = spsa_minimize(objective, theta0, cfg, spsa_seed, dim=circuit.num_parameters)

    final_state = run(circuit, theta)
    dist = sample(final_state, shots, final_seed)
    result = feasible_output(dist, inst.n, inst)
    elapsed = time.perf_counter() - start

    meta = {
        'objective_value': value,
        'final_expectation': exact_expectation(final_state, h),
        'spsa_iterations': len(history),
        'evaluations': 1 + 3 * len(history),
        'exact_objective': exact_objective,
    }
    if result.feasible:
        logger.debug(f"{method} seed {seed}: feasible {result.pi} cost {result.cost} p={result.probability:.4f}")
    else:
        logger.debug(f"{method} seed {seed}: no feasible bitstring in {shots} shots")
    return TrialRecord.from_feasible(seed, method, result, elapsed, dist, theta, meta)


def vqe_run(h: IsingHamiltonian, spec: AnsatzSpec, cfg: SpsaConfig, shots: int,
            initial_point: Optional[Sequence[float]], seed: int, inst: ProblemInstance,
            exact_objective: bool = False) -> TrialRecord:
    """
    One VQE trial.

    Args:
        h: Problem Hamiltonian
        spec: two_local or real_amplitudes spec of width h.num_qubits
        cfg: SPSA settings
        shots: Shots per sampled expectation and for the final distribution
        initial_point: Starting parameters; seeded uniform in [-pi, pi] when None
        seed: Trial seed
        inst: Instance used to decode and cost the final distribution
        exact_objective: Optimise the statevector expectation instead of
                         the shot estimate

    Returns:
        TrialRecord of method 'vqe'
    """
    if spec.form == 'qaoa':
        raise ValidationError("vqe_run takes a two_local or real_amplitudes spec; use qaoa_run for QAOA")
    _check_problem(h, spec.width, inst, shots)
    circuit = build_ansatz(spec)
    return _variational_run('vqe', circuit, h, cfg, shots, initial_point, seed, inst, exact_objective)


def qaoa_run(h: IsingHamiltonian, p: int, cfg: SpsaConfig, shots: int,
             initial_point: Optional[Sequence[float]], seed: int, inst: ProblemInstance,
             exact_objective: bool = False) -> TrialRecord:
    """One QAOA trial of depth p; parameters are (gamma_1..gamma_p, beta_1..beta_p)."""
    spec = AnsatzSpec('qaoa', p, h.num_qubits)
    _check_problem(h, spec.width, inst, shots)
    circuit = build_ansatz(spec, h)
    return _variational_run('qaoa', circuit, h, cfg, shots, initial_point, seed, inst, exact_objective)


def warm_start(h: IsingHamiltonian, spec_or_p: Union[AnsatzSpec, int], cfg: SpsaConfig,
               seed: int) -> np.ndarray:
    """
    Optimise the ansatz against the noiseless statevector expectation and
    return the parameters, for use as initial_point of sampled runs.
    """
    if isinstance(spec_or_p, AnsatzSpec):
        spec = spec_or_p
    else:
        spec = AnsatzSpec('qaoa', int(spec_or_p), h.num_qubits)
    if spec.width != h.num_qubits:
        raise ValidationError(f"ansatz width {spec.width} does not match Hamiltonian width {h.num_qubits}")
    check_capacity(spec.width)

    circuit = build_ansatz(spec, h if spec.form == 'qaoa' else None)
    spsa_seed, init_seed, _, _ = _derive_seeds(seed)
    theta0 = _initial_point(circuit, None, init_seed)
    objective = _make_objective(circuit, h, 1, 0, exact_objective=True)
    theta, value, _ = spsa_minimize(objective, theta0, cfg, spsa_seed, dim=circuit.num_parameters)
    logger.info(f"Warm start ({spec.form}, {cfg.maxiter} SPSA iterations): expectation {value:.6g}")
    return theta
