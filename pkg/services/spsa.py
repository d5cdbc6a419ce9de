"""
Simultaneous Perturbation Stochastic Approximation.

At iteration k (from 0) with a_k = a/(k+1)^alpha and c_k = c/(k+1)^gamma:
    delta  ~ Rademacher(+-1)
    g      = (f(theta + c_k delta) - f(theta - c_k delta)) / (2 c_k) * delta
    theta <- theta - a_k g
The objective is evaluated once at theta0 and three times per iteration
(both perturbations plus the updated point), 1 + 3 * maxiter in total.
"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from models.results import SpsaConfig, SpsaStep
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


def spsa_minimize(objective: Objective, theta0: Sequence[float], cfg: SpsaConfig, seed: int,
                  dim: Optional[int] = None) -> Tuple[np.ndarray, float, List[SpsaStep]]:
    """
    Minimise objective from theta0.

    Args:
        objective: Maps a parameter vector to a real value
        theta0: Starting point
        cfg: Iteration count and gain schedule
        seed: Seed of the perturbation RNG
        dim: Expected parameter dimension, checked against theta0

    Returns:
        (best theta seen, its value, per-iteration history)
    """
    theta = np.array(theta0, dtype=float)
    if theta.ndim != 1 or theta.size == 0:
        raise ValidationError(f"theta0 must be a non-empty vector, got shape {theta.shape}")
    if dim is not None and theta.size != dim:
        raise ValidationError(f"theta0 has {theta.size} entries, objective expects {dim}")

    rng = np.random.default_rng(seed)
    best_theta = theta.copy()
    best_value = float(objective(theta))
    history: List[SpsaStep] = []

    for k in range(cfg.maxiter):
        a_k = cfg.a / (k + 1) ** cfg.alpha
        c_k = cfg.c / (k + 1) ** cfg.gamma
        delta = rng.choice((-1.0, 1.0), size=theta.size)

        f_plus = float(objective(theta + c_k * delta))
        f_minus = float(objective(theta - c_k * delta))
        gradient = (f_plus - f_minus) / (2 * c_k) * delta
        theta = theta - a_k * gradient

        value = float(objective(theta))
        if value < best_value:
            best_theta, best_value = theta.copy(), value
        history.append(SpsaStep(k, value, f_plus, f_minus, a_k, c_k))

        if k % 50 == 0:
            logger.debug(f"SPSA iter {k}: value {value:.6g} best {best_value:.6g}")

    return best_theta, best_value, history
