"""
Solver configuration and outcome models.
Covers the classical solvers (SaConfig, SolveResult) and the
variational runs (AnsatzSpec, SpsaConfig, TrialRecord).
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from config import Config
from models.circuit import ShotDistribution
from models.instance import Permutation
from utils.error_handler import ValidationError

FLOOR_MODES = ('absolute', 'relative')
ANSATZ_FORMS = ('two_local', 'real_amplitudes', 'qaoa')
FORM_LABELS = {'two_local': 'TL', 'real_amplitudes': 'RA'}


@dataclass(frozen=True)
class SaConfig:
    """
    Simulated annealing parameters, in the benchmark's listing order
    [tolerance, Markov chain length, cooldown factor, starting temperature].

    Attributes:
        tolerance: Temperature floor (absolute, or relative to t_start)
        markov_len: Neighbour moves per temperature
        cooldown: Geometric cooling factor in (0, 1)
        t_start: Initial temperature
        floor_mode: 'absolute' stops at T < tolerance,
                    'relative' stops at T < tolerance * t_start
        max_chains: Hard cap on the number of temperature steps
    """
    tolerance: float = 0.01
    markov_len: int = 10
    cooldown: float = 0.8
    t_start: float = 10.0
    floor_mode: str = Config.SA_FLOOR_MODE
    max_chains: int = Config.SA_MAX_CHAINS

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValidationError(f"SA tolerance must be positive, got {self.tolerance}")
        if int(self.markov_len) != self.markov_len or self.markov_len < 1:
            raise ValidationError(f"SA Markov chain length must be a positive integer, got {self.markov_len}")
        if not 0 < self.cooldown < 1:
            raise ValidationError(f"SA cooldown must lie in (0, 1), got {self.cooldown}")
        if not self.t_start > 0:
            raise ValidationError(f"SA starting temperature must be positive, got {self.t_start}")
        if self.floor_mode not in FLOOR_MODES:
            raise ValidationError(f"SA floor mode must be one of {FLOOR_MODES}, got {self.floor_mode!r}")
        if self.max_chains < 1:
            raise ValidationError(f"SA max chains must be positive, got {self.max_chains}")
        object.__setattr__(self, 'markov_len', int(self.markov_len))

    @property
    def floor(self) -> float:
        if self.floor_mode == 'relative':
            return self.tolerance * self.t_start
        return self.tolerance

    @classmethod
    def parse(cls, text: str, **kwargs) -> 'SaConfig':
        """Parse 'tol,len,cool,t0' (brackets optional)."""
        parts = [p.strip() for p in text.strip().strip('[]').split(',') if p.strip()]
        if len(parts) != 4:
            raise ValidationError(f"SA parameters must be 'tol,len,cool,t0', got {text!r}")
        try:
            tol, length, cool, t0 = float(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])
        except ValueError:
            raise ValidationError(f"SA parameters must be numeric, got {text!r}")
        if not length.is_integer():
            raise ValidationError(f"SA Markov chain length must be an integer, got {parts[1]}")
        return cls(tol, int(length), cool, t0, **kwargs)

    def label(self) -> str:
        return f"[{self.tolerance:g}, {self.markov_len}, {self.cooldown:g}, {self.t_start:g}]"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tolerance': self.tolerance, 'markov_len': self.markov_len,
            'cooldown': self.cooldown, 't_start': self.t_start,
            'floor_mode': self.floor_mode, 'max_chains': self.max_chains
        }


@dataclass
class SolveResult:
    """
    Outcome of one classical solve.

    Attributes:
        pi: Best permutation found
        cost: Its cost (recomputable from pi)
        elapsed: Wall-clock seconds of the solve call
        meta: Solver counters (nodes for BNB, temperature steps for SA)
    """
    pi: Permutation
    cost: float
    elapsed: float
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'pi': list(self.pi), 'cost': self.cost, 'elapsed_s': self.elapsed, 'meta': self.meta}


@dataclass(frozen=True)
class SpsaConfig:
    """
    SPSA schedule a_k = a / (k+1)^alpha, c_k = c / (k+1)^gamma.

    Attributes:
        maxiter: Number of SPSA iterations ("SPSA trials")
        a: Step-size scale
        c: Perturbation scale
        alpha: Step decay exponent
        gamma: Perturbation decay exponent
    """
    maxiter: int = Config.DEFAULT_SPSA_MAXITER
    a: float = Config.SPSA_A
    c: float = Config.SPSA_C
    alpha: float = Config.SPSA_ALPHA
    gamma: float = Config.SPSA_GAMMA

    def __post_init__(self):
        if int(self.maxiter) != self.maxiter or self.maxiter < 1:
            raise ValidationError(f"SPSA maxiter must be a positive integer, got {self.maxiter}")
        if not self.a > 0 or not self.c > 0:
            raise ValidationError(f"SPSA a and c must be positive, got a={self.a}, c={self.c}")
        object.__setattr__(self, 'maxiter', int(self.maxiter))

    def to_dict(self) -> Dict[str, Any]:
        return {'maxiter': self.maxiter, 'a': self.a, 'c': self.c, 'alpha': self.alpha, 'gamma': self.gamma}


@dataclass(frozen=True)
class SpsaStep:
    """One SPSA iteration: the two perturbed values and the value after the update."""
    iteration: int
    value: float
    f_plus: float
    f_minus: float
    a_k: float
    c_k: float


@dataclass(frozen=True)
class AnsatzSpec:
    """
    Variational form description.

    Attributes:
        form: 'two_local', 'real_amplitudes' or 'qaoa'
        reps_or_p: Entangling repetitions (VQE forms) or depth p (QAOA)
        width: Qubit count
    """
    form: str
    reps_or_p: int
    width: int

    def __post_init__(self):
        if self.form not in ANSATZ_FORMS:
            raise ValidationError(f"unknown ansatz form {self.form!r}", details=f"expected one of {ANSATZ_FORMS}")
        if int(self.reps_or_p) != self.reps_or_p or self.reps_or_p < 1:
            raise ValidationError(f"reps/p must be a positive integer, got {self.reps_or_p}")
        if self.width < 1:
            raise ValidationError(f"ansatz width must be positive, got {self.width}")

    @property
    def num_parameters(self) -> int:
        if self.form == 'qaoa':
            return 2 * self.reps_or_p
        return self.width * (self.reps_or_p + 1)

    def to_dict(self) -> Dict[str, Any]:
        return {'form': self.form, 'reps_or_p': self.reps_or_p, 'width': self.width}


@dataclass(frozen=True)
class FeasibleResult:
    """
    Most probable feasible eigenstate of a distribution, or the
    infeasible marker (feasible=False, every other field empty).
    """
    feasible: bool
    best_bits: Optional[str] = None
    pi: Optional[Permutation] = None
    cost: Optional[float] = None
    probability: float = 0.0

    @classmethod
    def infeasible(cls) -> 'FeasibleResult':
        return cls(feasible=False)


@dataclass
class TrialRecord:
    """
    One trial of any method.

    Attributes:
        seed: Trial seed
        method: 'bnb', 'sa', 'vqe' or 'qaoa'
        feasible: Whether a feasible solution was returned
        best_bits: Most probable feasible bitstring (variational methods)
        pi: Decoded / returned permutation
        cost: Cost of pi
        probability: counts[best_bits] / shots (1.0 for classical solvers)
        elapsed: Wall-clock seconds of the trial
        distribution: Final shot histogram (variational methods)
        params: Optimised ansatz parameters (variational methods)
        meta: Method-specific counters
    """
    seed: int
    method: str
    feasible: bool
    best_bits: Optional[str] = None
    pi: Optional[Permutation] = None
    cost: Optional[float] = None
    probability: float = 0.0
    elapsed: float = 0.0
    distribution: Optional[ShotDistribution] = None
    params: List[float] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.feasible and self.cost is None:
            raise ValidationError("a feasible trial must carry a cost")
        if not self.feasible and (self.best_bits is not None or self.cost is not None):
            raise ValidationError("an infeasible trial carries no solution")

    @classmethod
    def from_feasible(cls, seed: int, method: str, result: FeasibleResult, elapsed: float,
                      distribution: ShotDistribution, params: Sequence[float],
                      meta: Optional[Dict[str, Any]] = None) -> 'TrialRecord':
        return cls(
            seed=seed, method=method, feasible=result.feasible,
            best_bits=result.best_bits, pi=result.pi, cost=result.cost,
            probability=result.probability, elapsed=elapsed,
            distribution=distribution, params=[float(v) for v in params],
            meta=dict(meta or {})
        )

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        """JSON form; include_timing=False leaves out elapsed_s for deterministic reports."""
        record = {
            'seed': self.seed,
            'method': self.method,
            'params': list(self.params),
            'best_bits': self.best_bits,
            'pi': list(self.pi) if self.pi is not None else None,
            'cost': self.cost,
            'probability': self.probability,
            'feasible': self.feasible,
        }
        if include_timing:
            record['elapsed_s'] = self.elapsed
        return record
