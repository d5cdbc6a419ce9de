"""
Solution-quality and timing metrics over a list of trials.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from models.experiment import MetricsSummary, UncertaintySummary
from models.results import TrialRecord

logger = logging.getLogger(__name__)

SUCCESS_LEVELS = (0.99, 0.95)
_RATIO_SLACK = 1e-12


def success_rule(optimum: float) -> str:
    """'ratio' (optimum/cost >= L) for positive optima, else 'exact_match'."""
    return 'ratio' if optimum > 0 else 'exact_match'


def _succeeds(record: TrialRecord, optimum: float, level: float) -> bool:
    if not record.feasible or record.cost is None:
        return False
    if success_rule(optimum) == 'exact_match':
        return abs(record.cost - optimum) <= 1e-9 * max(1.0, abs(optimum))
    if record.cost <= 0:
        return False
    return optimum / record.cost >= level - _RATIO_SLACK


def success_rates(records: Sequence[TrialRecord], optimum: float) -> Tuple[float, float]:
    """
    (sr99, sr95) as percentages of all trials; infeasible trials fail.

    A non-positive optimum switches to exact-match success, reported by
    success_rule().
    """
    if not records:
        return 0.0, 0.0
    if optimum <= 0:
        logger.warning(f"Optimum {optimum} is not positive; using exact-match success")
    total = len(records)
    sr99, sr95 = (
        100.0 * sum(_succeeds(r, optimum, level) for r in records) / total
        for level in SUCCESS_LEVELS
    )
    return sr99, sr95


def feasibility_rate(records: Sequence[TrialRecord]) -> float:
    if not records:
        return 0.0
    return 100.0 * sum(r.feasible for r in records) / len(records)


def uncertainty_stats(records: Sequence[TrialRecord]) -> UncertaintySummary:
    """
    Statistics of probability*100 over feasible trials. Classical trials
    return one deterministic answer and carry probability 1.0. Population
    standard deviation; all None when no trial is feasible.
    """
    values = np.array([100.0 * r.probability for r in records if r.feasible])
    if values.size == 0:
        return UncertaintySummary(n_feasible=0)
    return UncertaintySummary(
        n_feasible=int(values.size),
        mean=float(values.mean()),
        max=float(values.max()),
        min=float(values.min()),
        std=float(values.std()),
    )


def average_times(records: Sequence[TrialRecord]) -> Tuple[float, float]:
    """
    (AT, MT): mean elapsed time, and the mean after dropping values above
    the upper Tukey fence Q3 + 1.5 IQR.
    """
    if not records:
        return 0.0, 0.0
    times = np.array([r.elapsed for r in records], dtype=float)
    q1, q3 = np.percentile(times, [25, 75])
    fence = q3 + 1.5 * (q3 - q1)
    kept = times[times <= fence]
    return float(times.mean()), float(kept.mean())


def summarize(records: Sequence[TrialRecord], optimum: Optional[float]) -> MetricsSummary:
    """Every metric of one experiment in a MetricsSummary."""
    sr99, sr95 = success_rates(records, optimum) if optimum is not None else (0.0, 0.0)
    at, mt = average_times(records)
    return MetricsSummary(
        sr99=sr99,
        sr95=sr95,
        feasibility=feasibility_rate(records),
        at_seconds=at,
        mt_seconds=mt,
        uncertainty=uncertainty_stats(records),
        n_trials=len(records),
        success_rule=success_rule(optimum) if optimum is not None else 'ratio',
    )
