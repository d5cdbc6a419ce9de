"""
Simulated annealing over permutations with Metropolis acceptance and
geometric cooling. The neighbourhood is a uniform random transposition,
shared by TSP and QAP.
"""
import logging
import math
import time

import numpy as np

from models.instance import ProblemInstance
from models.results import SaConfig, SolveResult
from services.cost_model import solution_cost
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)


def sa_solve(inst: ProblemInstance, cfg: SaConfig, seed: int) -> SolveResult:
    """
    Anneal from a seeded random permutation.

    Each temperature step runs cfg.markov_len swap moves, then T is
    multiplied by cfg.cooldown. The run stops once T drops below the
    temperature floor (see SaConfig.floor_mode) or after cfg.max_chains
    steps.

    Args:
        inst: TSP or QAP instance, n >= 2
        cfg: Annealing parameters
        seed: RNG seed; identical inputs give identical results

    Returns:
        SolveResult holding the best permutation ever visited; meta has
        temperature_steps, accepted, improved and initial_cost
    """
    n = inst.n
    if n < 2:
        raise ValidationError(f"simulated annealing needs n >= 2, got {n}")
    if not isinstance(cfg, SaConfig):
        raise ValidationError(f"expected an SaConfig, got {type(cfg).__name__}")

    start = time.perf_counter()
    rng = np.random.default_rng(seed)

    current = [int(v) for v in rng.permutation(n)]
    current_cost = solution_cost(inst, current)
    initial_cost = current_cost
    best, best_cost = list(current), current_cost

    temperature = cfg.t_start
    floor = cfg.floor
    steps = accepted = improved = 0

    while temperature >= floor and steps < cfg.max_chains:
        for _ in range(cfg.markov_len):
            i, j = rng.choice(n, size=2, replace=False)
            current[i], current[j] = current[j], current[i]
            candidate_cost = solution_cost(inst, current)
            delta = candidate_cost - current_cost

            if delta <= 0 or rng.random() < math.exp(-delta / temperature):
                current_cost = candidate_cost
                accepted += 1
                if current_cost < best_cost:
                    best, best_cost = list(current), current_cost
                    improved += 1
            else:
                current[i], current[j] = current[j], current[i]

        steps += 1
        temperature *= cfg.cooldown
        logger.debug(f"SA step {steps}: T={temperature:.5g} current {current_cost} best {best_cost}")

    if steps >= cfg.max_chains and temperature >= floor:
        logger.warning(f"SA hit the chain cap ({cfg.max_chains}) before reaching the floor {floor}")

    elapsed = time.perf_counter() - start
    meta = {
        'temperature_steps': steps,
        'accepted': accepted,
        'improved': improved,
        'initial_cost': initial_cost,
        'final_temperature': temperature,
    }
    logger.debug(f"SA seed {seed} on {inst!r}: cost {best_cost} after {steps} steps")
    return SolveResult(pi=tuple(best), cost=best_cost, elapsed=elapsed, meta=meta)
