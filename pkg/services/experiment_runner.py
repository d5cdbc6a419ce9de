"""
Experiment orchestration: one instance, `trials` seeded trials of one
method, metrics against the oracle optimum.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from config import Config, get_config
from models.experiment import ExperimentConfig, ExperimentResult
from models.hamiltonian import IsingHamiltonian
from models.instance import ProblemInstance
from models.results import AnsatzSpec, TrialRecord
from services.branch_and_bound import bnb_solve
from services.cost_model import brute_force_optimum
from services.instance_loader import random_instance
from services.ising_encoder import build_model
from services.metrics import summarize
from services.simulated_annealing import sa_solve
from services.statevector_simulator import check_capacity
from services.variational_solver import qaoa_run, vqe_run, warm_start
from utils.error_handler import CapabilityError, SizeLimitError
from utils.logger import log_performance

logger = logging.getLogger(__name__)


def check_capability(cfg: ExperimentConfig, need_optimum: bool = True) -> None:
    """
    Reject size/method combinations this build cannot run, before any
    trial starts. need_optimum=False skips the brute-force oracle guard
    (single solves do not score against an optimum).

    Raises:
        SizeLimitError / CapabilityError (exit code 2)
    """
    if cfg.is_quantum:
        check_capacity(cfg.width)
    if cfg.method == 'bnb' and cfg.n > Config.BNB_MAX_SIZE:
        raise SizeLimitError(
            f"Branch-and-Bound is limited to n <= {Config.BNB_MAX_SIZE}",
            limit=Config.BNB_MAX_SIZE, actual=cfg.n
        )
    if need_optimum and cfg.optimum is None and cfg.n > Config.BRUTE_FORCE_MAX_SIZE:
        raise CapabilityError(
            f"no optimum for n={cfg.n}: brute force stops at n={Config.BRUTE_FORCE_MAX_SIZE}",
            details="supply a known optimum"
        )


def _classical_record(method: str, seed: int, result) -> TrialRecord:
    return TrialRecord(
        seed=seed, method=method, feasible=True, pi=result.pi, cost=result.cost,
        probability=1.0, elapsed=result.elapsed, meta=dict(result.meta)
    )


def prepare_variational(cfg: ExperimentConfig, inst: ProblemInstance
                        ) -> Tuple[Optional[IsingHamiltonian], Optional[np.ndarray], float]:
    """
    Hamiltonian and shared warm-start point for a variational experiment.

    Returns:
        (hamiltonian, initial point, warm-start seconds); (None, None, 0.0)
        for classical methods
    """
    if not cfg.is_quantum:
        return None, None, 0.0
    _, h = build_model(inst, cfg.penalty)
    if not cfg.warm_start:
        return h, None, 0.0
    started = time.perf_counter()
    spec_or_p = AnsatzSpec(cfg.form, cfg.reps, cfg.width) if cfg.method == 'vqe' else cfg.p
    initial_point = warm_start(h, spec_or_p, cfg.spsa, cfg.seed_base)
    return h, initial_point, time.perf_counter() - started


def run_trial(cfg: ExperimentConfig, inst: ProblemInstance, k: int,
              h: Optional[IsingHamiltonian] = None,
              initial_point: Optional[Sequence[float]] = None) -> TrialRecord:
    """Trial k of an experiment, seeded with cfg.seed_base + k."""
    seed = cfg.trial_seed(k)
    if cfg.method == 'bnb':
        return _classical_record('bnb', seed, bnb_solve(inst))
    if cfg.method == 'sa':
        return _classical_record('sa', seed, sa_solve(inst, cfg.sa, seed))
    if cfg.method == 'vqe':
        spec = AnsatzSpec(cfg.form, cfg.reps, cfg.width)
        return vqe_run(h, spec, cfg.spsa, cfg.shots, initial_point, seed, inst, cfg.exact_objective)
    return qaoa_run(h, cfg.p, cfg.spsa, cfg.shots, initial_point, seed, inst, cfg.exact_objective)


@log_performance(logger, threshold_seconds=300.0)
def run_experiment(cfg: ExperimentConfig, show_progress: Optional[bool] = None) -> ExperimentResult:
    """
    Run every trial of an experiment and summarise it.

    Args:
        cfg: Experiment configuration
        show_progress: tqdm progress bar; defaults to the active config

    Returns:
        ExperimentResult; its summary and records fields hold the metrics
        and the trials ordered by index
    """
    check_capability(cfg)
    if show_progress is None:
        show_progress = get_config().SHOW_PROGRESS

    inst = cfg.instance if cfg.instance is not None else random_instance(cfg.problem, cfg.n, cfg.seed_base)
    if cfg.optimum is not None:
        optimum = float(cfg.optimum)
    else:
        _, optimum = brute_force_optimum(inst)
    logger.info(f"Experiment {cfg.method} on {inst!r}: {cfg.trials} trials, optimum {optimum}")

    h, initial_point, warm_seconds = prepare_variational(cfg, inst)

    records = [None] * cfg.trials
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = {
            pool.submit(run_trial, cfg, inst, k, h, initial_point): k
            for k in range(cfg.trials)
        }
        progress = tqdm(
            as_completed(futures), total=cfg.trials, disable=not show_progress,
            desc=f"{cfg.problem}-{cfg.n} {cfg.method}", unit='trial'
        )
        for future in progress:
            records[futures[future]] = future.result()

    below = [r for r in records if r.feasible and r.cost < optimum - 1e-9 * max(1.0, abs(optimum))]
    if below:
        logger.warning(f"{len(below)} trial(s) beat the reference optimum {optimum}; is the supplied optimum right?")

    summary = summarize(records, optimum)
    logger.info(
        f"Experiment done: sr99 {summary.sr99:.1f} sr95 {summary.sr95:.1f} "
        f"feasible {summary.feasibility:.1f} AT {summary.at_seconds:.4f}s MT {summary.mt_seconds:.4f}s"
    )
    return ExperimentResult(
        config=cfg, instance=inst, optimum=optimum, summary=summary,
        records=records, warm_start_seconds=warm_seconds
    )

