"""
QUBO and Ising Hamiltonian models.

Variable k of a QUBO is qubit k of the Hamiltonian. For an instance of
size n, k = i*n + p where i is the row (city/facility) and p the column
(tour position/location).
"""
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from models.instance import Permutation
from utils.error_handler import ValidationError

Bits = Union[str, Sequence[int], np.ndarray]


def bits_to_array(bits: Bits, length: int) -> np.ndarray:
    """Normalise a bitstring ('0101') or 0/1 sequence to an int8 array of given length."""
    if isinstance(bits, str):
        if any(ch not in '01' for ch in bits):
            raise ValidationError(f"bitstring may only contain 0 and 1: {bits!r}")
        array = np.frombuffer(bits.encode('ascii'), dtype=np.uint8) - ord('0')
    else:
        array = np.asarray(bits)
        if array.size and not np.all((array == 0) | (array == 1)):
            raise ValidationError(f"bit values must be 0 or 1: {bits!r}")
    if array.ndim != 1 or array.shape[0] != length:
        raise ValidationError(f"expected {length} bits, got {len(array)}")
    return array.astype(np.int8)


def bits_to_string(bits: Bits) -> str:
    return ''.join(str(int(b)) for b in bits)


def index_to_bits(index: int, width: int) -> str:
    """Basis index -> bitstring with character k = qubit k (little endian)."""
    return format(index, f'0{width}b')[::-1]


def bits_to_index(bits: str) -> int:
    return int(bits[::-1], 2) if bits else 0


@dataclass
class QuboModel:
    """
    Penalty QUBO: offset + sum linear[k] x_k + sum quadratic[(j,k)] x_j x_k.

    Attributes:
        num_vars: n^2
        linear: variable -> coefficient
        quadratic: (j, k) with j < k -> coefficient
        offset: Constant term
        penalty: Constraint weight (A for TSP, B for QAP)
        n: Instance size
        objective: The objective-only part (same structure, penalty 0)
    """
    num_vars: int
    linear: Dict[int, float] = field(default_factory=dict)
    quadratic: Dict[Tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    penalty: float = 0.0
    n: int = 0
    objective: Optional['QuboModel'] = None

    def add_linear(self, var: int, value: float) -> None:
        self._check_var(var)
        self.linear[var] = self.linear.get(var, 0.0) + value

    def add_quadratic(self, u: int, v: int, value: float) -> None:
        if u == v:
            # x^2 = x for binary variables
            self.add_linear(u, value)
            return
        self._check_var(u)
        self._check_var(v)
        key = (u, v) if u < v else (v, u)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + value

    def _check_var(self, var: int) -> None:
        if not 0 <= var < self.num_vars:
            raise ValidationError(f"variable {var} outside [0, {self.num_vars})")

    def evaluate(self, bits: Bits) -> float:
        x = bits_to_array(bits, self.num_vars)
        value = self.offset
        value += sum(coeff for var, coeff in self.linear.items() if x[var])
        value += sum(coeff for (u, v), coeff in self.quadratic.items() if x[u] and x[v])
        return float(value)

    def split_eval(self, bits: Bits) -> Tuple[float, float]:
        """(objective part, penalty part) of the QUBO value."""
        total = self.evaluate(bits)
        objective = self.objective.evaluate(bits) if self.objective is not None else total
        return objective, total - objective


@dataclass(frozen=True)
class IsingHamiltonian:
    """
    Diagonal Hamiltonian constant + sum_t coeff_t * prod_{q in support_t} Z_q.

    Attributes:
        terms: ((coeff, qubits), ...) with sorted, distinct qubit tuples
        constant: Identity coefficient
        num_qubits: Register width
    """
    terms: Tuple[Tuple[float, Tuple[int, ...]], ...]
    constant: float
    num_qubits: int

    def __post_init__(self):
        normalised = []
        seen = set()
        for coeff, qubits in self.terms:
            support = tuple(sorted(int(q) for q in qubits))
            if not support:
                raise ValidationError("empty support belongs in the constant")
            if len(set(support)) != len(support) or support in seen:
                raise ValidationError(f"duplicate qubit support {support}")
            if support[0] < 0 or support[-1] >= self.num_qubits:
                raise ValidationError(f"support {support} outside {self.num_qubits} qubits")
            seen.add(support)
            normalised.append((float(coeff), support))
        object.__setattr__(self, 'terms', tuple(normalised))
        object.__setattr__(self, 'constant', float(self.constant))

    @cached_property
    def _diagonal(self) -> np.ndarray:
        indices = np.arange(2 ** self.num_qubits, dtype=np.int64)
        energies = np.full(indices.shape, self.constant, dtype=float)
        for coeff, support in self.terms:
            parity = np.zeros(indices.shape, dtype=np.int64)
            for q in support:
                parity ^= (indices >> q) & 1
            energies += coeff * (1 - 2 * parity)
        energies.setflags(write=False)
        return energies

    def diagonal(self) -> np.ndarray:
        """Energies of every basis state, indexed by sum_k bit_k 2^k."""
        return self._diagonal

    def locality(self) -> int:
        return max((len(s) for _, s in self.terms), default=0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'num_qubits': self.num_qubits,
            'constant': self.constant,
            'terms': [{'coeff': coeff, 'qubits': list(support)} for coeff, support in self.terms]
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'IsingHamiltonian':
        return cls(
            terms=tuple((t['coeff'], tuple(t['qubits'])) for t in data['terms']),
            constant=data['constant'],
            num_qubits=int(data['num_qubits'])
        )

    @classmethod
    def from_json(cls, text: str) -> 'IsingHamiltonian':
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DecodedSolution:
    """
    Bitstring interpreted as an n x n assignment matrix.

    Attributes:
        feasible: True iff the matrix is a permutation matrix
        pi: Decoded permutation (feasible only)
        cost: Cost of pi on the instance (feasible only)
    """
    feasible: bool
    pi: Optional[Permutation] = None
    cost: Optional[float] = None
