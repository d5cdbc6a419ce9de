"""
Per-size parameter presets for the benchmark experiments.

SA entries are [tolerance, Markov chain length, cooldown, starting
temperature]; VQE entries are [SPSA iterations, form]; QAOA entries are
[SPSA iterations].
"""

from typing import Any, Dict, List, Optional

from models.results import SaConfig, SpsaConfig
from utils.error_handler import ValidationError

_TSP_SA = [0.01, 10, 0.8, 10]
_QAP_SA = [1.0, 20, 0.90, 20]

PRESETS = {
    'tsp': {
        'sa': {3: _TSP_SA, 4: _TSP_SA, 5: _TSP_SA, 6: _TSP_SA, 7: _TSP_SA},
        'vqe': {3: [100, 'TL'], 4: [1100, 'TL'], 5: [5500, 'RA'], 6: [5000, 'TL'], 7: [10000, 'TL']},
        'qaoa': {3: [50], 4: [100]},
    },
    'qap': {
        'sa': {3: _QAP_SA, 4: _QAP_SA, 5: _QAP_SA, 6: _QAP_SA, 7: [1.0, 20, 0.90, 740]},
        'vqe': {3: [1000, 'TL'], 4: [3000, 'TL'], 5: [5000, 'TL'], 6: [6000, 'TL'], 7: [12000, 'TL']},
        'qaoa': {3: [100], 4: [50]},
    },
}

FORM_CODES = {'TL': 'two_local', 'RA': 'real_amplitudes'}


def get_preset(problem: str, n: int, method: str) -> Optional[List[Any]]:
    """
    Raw preset entry for (problem, n, method).

    Returns:
        The listed parameters, or None when no preset exists
    """
    return PRESETS.get(problem, {}).get(method, {}).get(n)


def has_preset(problem: str, n: int, method: str) -> bool:
    return get_preset(problem, n, method) is not None


def preset_sizes(problem: str, method: str) -> List[int]:
    return sorted(PRESETS.get(problem, {}).get(method, {}))


def preset_overrides(problem: str, n: int, method: str) -> Dict[str, Any]:
    """
    ExperimentConfig keyword arguments for a preset.

    Raises:
        ValidationError: no preset for this combination
    """
    entry = get_preset(problem, n, method)
    if entry is None:
        raise ValidationError(
            f"no preset for {method} on {problem} n={n}",
            details=f"preset sizes: {preset_sizes(problem, method) or 'none'}"
        )
    if method == 'sa':
        tolerance, length, cooldown, t_start = entry
        return {'sa': SaConfig(tolerance, length, cooldown, t_start)}
    if method == 'vqe':
        maxiter, form = entry
        return {'spsa': SpsaConfig(maxiter=maxiter), 'form': FORM_CODES[form]}
    return {'spsa': SpsaConfig(maxiter=entry[0])}
