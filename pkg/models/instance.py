"""
Problem instance models for COPQ bench.
A TSP instance is one distance matrix; a QAP instance is a flow and a
distance matrix. Both are immutable once constructed.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from utils.error_handler import ValidationError

# 0-indexed tour order (TSP) or facility -> location map (QAP)
Permutation = Tuple[int, ...]


def _as_cost_matrix(values: Any, name: str) -> np.ndarray:
    """Copy values into a read-only float matrix and check the shared invariants."""
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} is not a numeric matrix", details=str(e))

    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"{name} must be square", details=f"shape {matrix.shape}")
    if matrix.shape[0] < 1:
        raise ValidationError(f"{name} must have at least one row")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{name} contains non-finite entries")
    if np.any(matrix < 0):
        raise ValidationError(f"{name} contains negative entries")
    if np.any(np.diag(matrix) != 0):
        raise ValidationError(f"{name} must have a zero diagonal")

    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class TspInstance:
    """
    Travelling salesman instance.

    Attributes:
        d: n x n matrix of non-negative distances, zero diagonal
        name: Optional label (file stem or generator signature)
    """
    d: np.ndarray
    name: str = ''
    kind: str = field(default='tsp', init=False)

    def __post_init__(self):
        object.__setattr__(self, 'd', _as_cost_matrix(self.d, 'distance matrix'))

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.d, self.d.T))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TspInstance):
            return NotImplemented
        return np.array_equal(self.d, other.d)

    def __hash__(self) -> int:
        return hash(('tsp', self.d.tobytes()))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'n': self.n, 'name': self.name, 'd': self.d.tolist()}

    def __repr__(self) -> str:
        return f"<TspInstance n={self.n} name={self.name!r}>"


@dataclass(frozen=True, eq=False)
class QapInstance:
    """
    Quadratic assignment instance.

    Attributes:
        b: n x n flow matrix between facilities
        c: n x n distance (cost) matrix between locations
        name: Optional label
    """
    b: np.ndarray
    c: np.ndarray
    name: str = ''
    kind: str = field(default='qap', init=False)

    def __post_init__(self):
        flow = _as_cost_matrix(self.b, 'flow matrix')
        dist = _as_cost_matrix(self.c, 'distance matrix')
        if flow.shape != dist.shape:
            raise ValidationError(
                "flow and distance matrices must have the same size",
                details=f"{flow.shape} vs {dist.shape}"
            )
        object.__setattr__(self, 'b', flow)
        object.__setattr__(self, 'c', dist)

    @property
    def n(self) -> int:
        return int(self.b.shape[0])

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.b, self.b.T) and np.array_equal(self.c, self.c.T))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QapInstance):
            return NotImplemented
        return np.array_equal(self.b, other.b) and np.array_equal(self.c, other.c)

    def __hash__(self) -> int:
        return hash(('qap', self.b.tobytes(), self.c.tobytes()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind, 'n': self.n, 'name': self.name,
            'b': self.b.tolist(), 'c': self.c.tolist()
        }

    def __repr__(self) -> str:
        return f"<QapInstance n={self.n} name={self.name!r}>"


ProblemInstance = Union[TspInstance, QapInstance]

PROBLEM_KINDS = ('tsp', 'qap')


def validate_permutation(pi: Sequence[int], n: int) -> Permutation:
    """
    Check that pi is a bijection on {0..n-1} and return it as a tuple.

    Raises:
        ValidationError: wrong length or repeated/out-of-range values
    """
    perm = tuple(int(v) for v in pi)
    if len(perm) != n:
        raise ValidationError(
            "permutation length does not match instance size",
            details=f"expected {n}, got {len(perm)}"
        )
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"not a permutation of 0..{n - 1}: {perm}")
    return perm


def validate_prefix(prefix: Sequence[int], n: int) -> Permutation:
    """Check that prefix holds distinct values in [0, n) and is at most n long."""
    partial = tuple(int(v) for v in prefix)
    if len(partial) > n:
        raise ValidationError(f"prefix longer than instance size {n}: {partial}")
    if len(set(partial)) != len(partial) or any(v < 0 or v >= n for v in partial):
        raise ValidationError(f"invalid prefix for size {n}: {partial}")
    return partial


def instance_from_dict(data: Dict[str, Any]) -> ProblemInstance:
    """Rebuild an instance from its to_dict() form."""
    kind = data.get('kind')
    if kind == 'tsp':
        return TspInstance(d=data['d'], name=data.get('name', ''))
    if kind == 'qap':
        return QapInstance(b=data['b'], c=data['c'], name=data.get('name', ''))
    raise ValidationError(f"unknown problem kind: {kind!r}")
