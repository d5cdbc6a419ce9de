"""
Exact best-first Branch-and-Bound for TSP and QAP.

TSP branches on the city at the next tour position with city 0 fixed at
position 0; QAP branches on the location of the next facility. The
frontier is a heap ordered by lower bound, seeded with an incumbent from
a greedy dive.
"""
import heapq
import itertools
import logging
import time
from typing import List, Sequence, Tuple

import numpy as np

from config import Config
from models.instance import Permutation, ProblemInstance, QapInstance, TspInstance, validate_prefix
from models.results import SolveResult
from services.cost_model import solution_cost
from utils.error_handler import SizeLimitError, ValidationError

logger = logging.getLogger(__name__)

_EPS = 1e-9


def _tsp_bound(d: np.ndarray, prefix: Permutation) -> float:
    n = d.shape[0]
    k = len(prefix)
    if k == n:
        return float(d[list(prefix), list(prefix[1:] + prefix[:1])].sum())

    masked = d + np.diag(np.full(n, np.inf))
    if k == 0:
        return float(masked.min(axis=1).sum())

    bound = float(sum(d[prefix[t], prefix[t + 1]] for t in range(k - 1)))
    unvisited = [c for c in range(n) if c not in prefix]
    bound += float(masked[prefix[-1], unvisited].min())
    # each unvisited city leaves towards another unvisited city or back to the start
    targets = unvisited + [prefix[0]]
    sub = masked[np.ix_(unvisited, targets)]
    bound += float(sub.min(axis=1).sum())
    return bound


def _qap_bound(b: np.ndarray, c: np.ndarray, prefix: Permutation) -> float:
    n = b.shape[0]
    k = len(prefix)
    assigned = np.array(prefix, dtype=int)
    bound = float((b[:k, :k] * c[np.ix_(assigned, assigned)]).sum()) if k else 0.0
    if k == n:
        return bound

    off_diagonal = ~np.eye(n, dtype=bool)
    open_facility = np.zeros(n, dtype=bool)
    open_facility[k:] = True
    facility_pairs = off_diagonal & (open_facility[:, None] | open_facility[None, :])

    free_location = np.ones(n, dtype=bool)
    free_location[assigned] = False
    location_pairs = off_diagonal & (free_location[:, None] | free_location[None, :])

    # largest remaining flows against the smallest reachable distances
    flows = np.sort(b[facility_pairs])[::-1]
    distances = np.sort(c[location_pairs])[:flows.size]
    return bound + float(np.dot(flows, distances))


def lower_bound(inst: ProblemInstance, partial: Sequence[int]) -> float:
    """
    Admissible bound on every completion of a partial assignment.

    Args:
        inst: TSP or QAP instance
        partial: Cities at positions 0..k-1 (TSP) or locations of
                 facilities 0..k-1 (QAP)

    Returns:
        A value <= the cost of every completion; the exact cost for a full
        permutation
    """
    prefix = validate_prefix(partial, inst.n)
    if isinstance(inst, TspInstance):
        return _tsp_bound(inst.d, prefix)
    return _qap_bound(inst.b, inst.c, prefix)


def _root(inst: ProblemInstance) -> Permutation:
    return (0,) if isinstance(inst, TspInstance) else ()


def _children(prefix: Permutation, n: int) -> List[Permutation]:
    used = set(prefix)
    return [prefix + (v,) for v in range(n) if v not in used]


def _greedy_dive(inst: ProblemInstance) -> Tuple[Permutation, float]:
    prefix = _root(inst)
    while len(prefix) < inst.n:
        prefix = min(_children(prefix, inst.n), key=lambda child: (lower_bound(inst, child), child))
    return prefix, solution_cost(inst, prefix)


def bnb_solve(inst: ProblemInstance, audit: bool = False) -> SolveResult:
    """
    Solve exactly by best-first Branch-and-Bound.

    Args:
        inst: TSP or QAP instance, 2 <= n <= Config.BNB_MAX_SIZE
        audit: Record (bound, incumbent) for every expanded node in
               meta['audit']

    Returns:
        SolveResult with meta counters nodes_explored, nodes_pruned,
        max_frontier and incumbent_updates

    Raises:
        SizeLimitError: n above the configured cap
    """
    n = inst.n
    if n < 2:
        raise ValidationError(f"Branch-and-Bound needs n >= 2, got {n}")
    if n > Config.BNB_MAX_SIZE:
        raise SizeLimitError(
            f"Branch-and-Bound is limited to n <= {Config.BNB_MAX_SIZE}",
            limit=Config.BNB_MAX_SIZE, actual=n
        )

    start = time.perf_counter()
    best_pi, best_cost = _greedy_dive(inst)
    logger.debug(f"BNB greedy incumbent for {inst!r}: {best_pi} cost {best_cost}")

    counter = itertools.count()
    root = _root(inst)
    frontier = [(lower_bound(inst, root), next(counter), root)]
    explored = pruned = updates = 0
    max_frontier = 1
    trail = []

    while frontier:
        bound, _, prefix = heapq.heappop(frontier)
        if bound >= best_cost - _EPS:
            # every queued bound is at least this one
            pruned += 1 + len(frontier)
            break

        explored += 1
        if audit:
            trail.append((bound, best_cost))
            logger.debug(f"BNB expand {prefix} bound {bound} incumbent {best_cost}")

        for child in _children(prefix, n):
            if len(child) == n:
                cost = solution_cost(inst, child)
                if cost < best_cost - _EPS:
                    best_pi, best_cost = child, cost
                    updates += 1
                continue
            child_bound = lower_bound(inst, child)
            if child_bound < best_cost - _EPS:
                heapq.heappush(frontier, (child_bound, next(counter), child))
            else:
                pruned += 1
        max_frontier = max(max_frontier, len(frontier))

    elapsed = time.perf_counter() - start
    meta = {
        'nodes_explored': explored,
        'nodes_pruned': pruned,
        'max_frontier': max_frontier,
        'incumbent_updates': updates,
    }
    if audit:
        meta['audit'] = trail

    logger.info(f"BNB solved {inst!r}: cost {best_cost} in {elapsed:.4f}s ({explored} nodes)")
    return SolveResult(pi=tuple(best_pi), cost=best_cost, elapsed=elapsed, meta=meta)
