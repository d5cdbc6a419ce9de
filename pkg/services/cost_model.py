"""
Cost functions and the exhaustive oracle for TSP and QAP.
Every other module measures solution quality through these functions.
"""
import itertools
import logging
from typing import Sequence, Tuple

import numpy as np

from config import Config
from models.instance import (
    Permutation, ProblemInstance, QapInstance, TspInstance, validate_permutation
)
from utils.error_handler import SizeLimitError, ValidationError

logger = logging.getLogger(__name__)


def tour_cost(inst: TspInstance, pi: Sequence[int]) -> float:
    """
    Length of the closed tour visiting cities in the order pi.

    Args:
        inst: TSP instance
        pi: Tour order (0-indexed cities)

    Returns:
        Sum of d[pi(k)][pi(k+1 mod n)] over all k
    """
    if inst.n < 2:
        raise ValidationError("a tour needs at least two cities", details=f"n={inst.n}")
    perm = np.asarray(validate_permutation(pi, inst.n))
    return float(inst.d[perm, np.roll(perm, -1)].sum())


def qap_cost(inst: QapInstance, pi: Sequence[int]) -> float:
    """
    Assignment cost sum_k sum_l b[k][l] * c[pi(k)][pi(l)].

    Args:
        inst: QAP instance
        pi: pi[k] is the location of facility k

    Returns:
        Total flow-weighted distance
    """
    perm = np.asarray(validate_permutation(pi, inst.n))
    return float((inst.b * inst.c[np.ix_(perm, perm)]).sum())


def solution_cost(inst: ProblemInstance, pi: Sequence[int]) -> float:
    """Dispatch to tour_cost or qap_cost by instance kind."""
    if isinstance(inst, TspInstance):
        return tour_cost(inst, pi)
    if isinstance(inst, QapInstance):
        return qap_cost(inst, pi)
    raise ValidationError(f"unsupported instance type: {type(inst).__name__}")


def brute_force_optimum(inst: ProblemInstance) -> Tuple[Permutation, float]:
    """
    Exhaustive minimum over all n! permutations.

    Permutations are visited in lexicographic order and only a strictly
    better cost replaces the incumbent, so ties resolve to the
    lexicographically smallest permutation.

    Raises:
        SizeLimitError: n above Config.BRUTE_FORCE_MAX_SIZE
    """
    n = inst.n
    if n > Config.BRUTE_FORCE_MAX_SIZE:
        raise SizeLimitError(
            f"brute force is limited to n <= {Config.BRUTE_FORCE_MAX_SIZE}",
            limit=Config.BRUTE_FORCE_MAX_SIZE, actual=n
        )

    best_pi: Permutation = tuple(range(n))
    best_cost = solution_cost(inst, best_pi)
    for perm in itertools.permutations(range(n)):
        cost = solution_cost(inst, perm)
        if cost < best_cost:
            best_pi, best_cost = perm, cost

    logger.debug(f"Brute-force optimum for {inst!r}: {best_pi} cost {best_cost}")
    return best_pi, best_cost


def rotate(pi: Sequence[int], k: int = 1) -> Permutation:
    """Cyclic rotation of a tour; the closed tour length is unchanged."""
    perm = tuple(pi)
    k %= max(len(perm), 1)
    return perm[k:] + perm[:k]
