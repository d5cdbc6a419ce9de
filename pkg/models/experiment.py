"""
Experiment configuration and aggregate metric models for the bench harness.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from config import Config
from models.instance import PROBLEM_KINDS, ProblemInstance
from models.results import ANSATZ_FORMS, FORM_LABELS, SaConfig, SpsaConfig, TrialRecord
from utils.error_handler import ValidationError

METHODS = ('bnb', 'sa', 'vqe', 'qaoa')
QUANTUM_METHODS = ('vqe', 'qaoa')
VQE_FORMS = tuple(f for f in ANSATZ_FORMS if f != 'qaoa')


@dataclass
class ExperimentConfig:
    """
    One (problem, size, method) experiment of `trials` seeded trials.

    Trial k runs with seed seed_base + k. The instance is generated from
    (problem, n, seed_base) unless one is supplied.

    Attributes:
        problem: 'tsp' or 'qap'
        n: Instance size
        method: 'bnb', 'sa', 'vqe' or 'qaoa'
        trials: Number of trials
        seed_base: Base seed
        shots: Shots per sampled expectation and final distribution
        sa: SA parameters (method 'sa')
        spsa: SPSA parameters (variational methods)
        form: VQE ansatz form
        reps: VQE entangling repetitions
        p: QAOA depth
        penalty: Constraint weight; default_penalty(instance) when None
        exact_objective: Optimise the statevector expectation instead of the sampled estimate
        warm_start: Compute one exact-objective initial point shared by all trials
        instance: Explicit instance (e.g. parsed from a file)
        optimum: Externally known optimum; brute force otherwise
        workers: Concurrent trial workers
    """
    problem: str
    n: int
    method: str
    trials: int = Config.DEFAULT_TRIALS
    seed_base: int = 0
    shots: int = Config.DEFAULT_SHOTS
    sa: SaConfig = field(default_factory=SaConfig)
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    form: str = 'two_local'
    reps: int = Config.DEFAULT_VQE_REPS
    p: int = Config.DEFAULT_QAOA_P
    penalty: Optional[float] = None
    exact_objective: bool = False
    warm_start: bool = True
    instance: Optional[ProblemInstance] = None
    optimum: Optional[float] = None
    workers: int = Config.DEFAULT_WORKERS

    def __post_init__(self):
        if self.problem not in PROBLEM_KINDS:
            raise ValidationError(f"unknown problem {self.problem!r}", details=f"expected one of {PROBLEM_KINDS}")
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}", details=f"expected one of {METHODS}")
        if self.instance is not None:
            if self.instance.kind != self.problem:
                raise ValidationError(f"instance is {self.instance.kind}, experiment is {self.problem}")
            self.n = self.instance.n
        if self.n < 2:
            raise ValidationError(f"instance size must be at least 2, got {self.n}")
        if self.trials < 1:
            raise ValidationError(f"trials must be at least 1, got {self.trials}")
        if self.seed_base < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed_base}")
        if self.shots < 1:
            raise ValidationError(f"shots must be at least 1, got {self.shots}")
        if self.form not in VQE_FORMS:
            raise ValidationError(f"VQE form must be one of {VQE_FORMS}, got {self.form!r}")
        if self.reps < 1 or self.p < 1:
            raise ValidationError(f"reps and p must be positive, got reps={self.reps}, p={self.p}")
        if self.penalty is not None and not self.penalty > 0:
            raise ValidationError(f"penalty must be positive, got {self.penalty}")
        if self.workers < 1:
            raise ValidationError(f"workers must be at least 1, got {self.workers}")

    @property
    def is_quantum(self) -> bool:
        return self.method in QUANTUM_METHODS

    @property
    def width(self) -> int:
        return self.n * self.n

    def trial_seed(self, k: int) -> int:
        return self.seed_base + k

    def par_label(self) -> str:
        """Per-method parameter label as listed in the benchmark tables."""
        if self.method == 'sa':
            return self.sa.label()
        if self.method == 'vqe':
            return f"[{self.spsa.maxiter}, {FORM_LABELS[self.form]}]"
        if self.method == 'qaoa':
            return f"[{self.spsa.maxiter}]"
        return '-'

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'problem': self.problem,
            'n': self.n,
            'method': self.method,
            'trials': self.trials,
            'seed_base': self.seed_base,
            'par': self.par_label(),
        }
        if self.method == 'sa':
            data['sa'] = self.sa.to_dict()
        if self.is_quantum:
            data['shots'] = self.shots
            data['spsa'] = self.spsa.to_dict()
            data['exact_objective'] = self.exact_objective
            data['warm_start'] = self.warm_start
            data['penalty'] = self.penalty
            if self.method == 'vqe':
                data['form'] = self.form
                data['reps'] = self.reps
            else:
                data['p'] = self.p
        return data


def _fmt(value: Optional[float]) -> str:
    return '-' if value is None else f"{value:.2f}"


@dataclass(frozen=True)
class UncertaintySummary:
    """
    Statistics of probability*100 over feasible trials.
    Every statistic is None when no trial was feasible.
    """
    n_feasible: int = 0
    mean: Optional[float] = None
    max: Optional[float] = None
    min: Optional[float] = None
    std: Optional[float] = None

    def formatted(self) -> Dict[str, str]:
        """Two-decimal rendering, '-' for absent statistics."""
        return {
            'n_feas': str(self.n_feasible),
            'unc_mean': _fmt(self.mean),
            'unc_max': _fmt(self.max),
            'unc_min': _fmt(self.min),
            'unc_std': _fmt(self.std),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {'n_feasible': self.n_feasible, 'mean': self.mean, 'max': self.max,
                'min': self.min, 'std': self.std}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UncertaintySummary':
        return cls(
            n_feasible=int(data['n_feasible']), mean=data.get('mean'),
            max=data.get('max'), min=data.get('min'), std=data.get('std')
        )


@dataclass(frozen=True)
class MetricsSummary:
    """
    Aggregate experiment metrics.

    Attributes:
        sr99: % of trials with optimum/cost >= 0.99
        sr95: % of trials with optimum/cost >= 0.95
        feasibility: % of trials returning a feasible solution
        at_seconds: Mean trial time
        mt_seconds: Mean trial time without upper outliers
        uncertainty: Most-probable-feasible-state statistics
        n_trials: Number of trials summarised
        success_rule: 'ratio' or 'exact_match'
    """
    sr99: float
    sr95: float
    feasibility: float
    at_seconds: float
    mt_seconds: float
    uncertainty: UncertaintySummary
    n_trials: int
    success_rule: str = 'ratio'

    def __post_init__(self):
        if not 0 <= self.sr99 <= self.sr95 <= self.feasibility <= 100:
            raise ValidationError(
                "inconsistent success metrics",
                details=f"sr99={self.sr99}, sr95={self.sr95}, feasibility={self.feasibility}"
            )

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            'sr99': self.sr99,
            'sr95': self.sr95,
            'feasibility': self.feasibility,
            'n_trials': self.n_trials,
            'success_rule': self.success_rule,
            'uncertainty': self.uncertainty.to_dict(),
        }
        if include_timing:
            data['at_s'] = self.at_seconds
            data['mt_s'] = self.mt_seconds
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], timing: Optional[Dict[str, Any]] = None) -> 'MetricsSummary':
        """Rebuild from to_dict(); AT/MT come from `timing` when given."""
        timing = timing or data
        return cls(
            sr99=float(data['sr99']),
            sr95=float(data['sr95']),
            feasibility=float(data['feasibility']),
            at_seconds=float(timing.get('at_s', 0.0)),
            mt_seconds=float(timing.get('mt_s', 0.0)),
            uncertainty=UncertaintySummary.from_dict(data['uncertainty']),
            n_trials=int(data['n_trials']),
            success_rule=data.get('success_rule', 'ratio'),
        )


@dataclass
class ExperimentResult:
    """
    Outcome of run_experiment.

    Attributes:
        config: The experiment that ran
        instance: Instance every trial solved
        optimum: Reference optimum the success rates were measured against
        summary: Aggregate metrics
        records: Trial records ordered by trial index
        warm_start_seconds: Time spent on the shared warm start (0 when none)
    """
    config: ExperimentConfig
    instance: ProblemInstance
    optimum: float
    summary: MetricsSummary
    records: List[TrialRecord]
    warm_start_seconds: float = 0.0
