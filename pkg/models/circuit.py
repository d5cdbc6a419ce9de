"""
Circuit models for the statevector simulator.

A Circuit is a flat gate list over `width` qubits. Rotation angles are
either plain floats or ParameterRef slots (scale * theta[index] + offset)
bound at execution time.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.error_handler import BindingError, ValidationError


class GateKind(Enum):
    """Gate vocabulary: the device basis plus ansatz construction gates."""
    X = ('X', 1, False)
    SX = ('SX', 1, False)
    RZ = ('RZ', 1, True)
    RY = ('RY', 1, True)
    RX = ('RX', 1, True)
    H = ('H', 1, False)
    ID = ('ID', 1, False)
    CX = ('CX', 2, False)
    RZZ = ('RZZ', 2, True)

    def __init__(self, label: str, n_qubits: int, parametric: bool):
        self.label = label
        self.n_qubits = n_qubits
        self.parametric = parametric

    @classmethod
    def from_label(cls, label: str) -> 'GateKind':
        for kind in cls:
            if kind.label == label.upper():
                return kind
        raise KeyError(label)


# Device-native basis
BASIS_GATES = frozenset({GateKind.CX, GateKind.ID, GateKind.RZ, GateKind.SX, GateKind.X})


@dataclass(frozen=True)
class ParameterRef:
    """Symbolic angle scale * theta[index] + offset."""
    index: int
    scale: float = 1.0
    offset: float = 0.0

    def bind(self, values: Sequence[float]) -> float:
        if self.index >= len(values):
            raise BindingError(
                f"parameter p[{self.index}] is unbound",
                details=f"{len(values)} values supplied"
            )
        return self.scale * float(values[self.index]) + self.offset

    def shifted(self, offset: float) -> 'ParameterRef':
        return ParameterRef(self.index, self.scale, self.offset + offset)

    def __str__(self) -> str:
        text = f"{self.scale!r}*p[{self.index}]"
        if self.offset:
            text += f"{self.offset:+}"
        return text


Angle = Union[float, ParameterRef]


@dataclass(frozen=True)
class Gate:
    """
    One gate application.

    Attributes:
        kind: GateKind
        qubits: Target qubits; for CX the control is listed first
        theta: Rotation angle in radians (parametric kinds only)
    """
    kind: GateKind
    qubits: Tuple[int, ...]
    theta: Optional[Angle] = None

    def __post_init__(self):
        object.__setattr__(self, 'qubits', tuple(int(q) for q in self.qubits))
        if len(self.qubits) != self.kind.n_qubits:
            raise ValidationError(
                f"{self.kind.label} acts on {self.kind.n_qubits} qubit(s), got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"{self.kind.label} qubits must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValidationError(f"negative qubit index in {self.qubits}")
        if self.kind.parametric:
            if self.theta is None:
                raise ValidationError(f"{self.kind.label} requires an angle")
            if not isinstance(self.theta, ParameterRef):
                theta = float(self.theta)
                if not np.isfinite(theta):
                    raise ValidationError(f"{self.kind.label} angle must be finite, got {theta}")
                object.__setattr__(self, 'theta', theta)
        elif self.theta is not None:
            raise ValidationError(f"{self.kind.label} takes no angle")

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.theta, ParameterRef)

    def bound(self, values: Sequence[float]) -> 'Gate':
        if not self.is_symbolic:
            return self
        return Gate(self.kind, self.qubits, self.theta.bind(values))


@dataclass
class Circuit:
    """
    Parametrized circuit.

    Attributes:
        width: Number of qubits
        gates: Ordered gate list
        num_parameters: Number of symbolic slots theta[0..num_parameters-1]
        name: Optional label (ansatz form)
    """
    width: int
    gates: List[Gate] = field(default_factory=list)
    num_parameters: int = 0
    name: str = ''

    def __post_init__(self):
        if self.width < 1:
            raise ValidationError(f"circuit width must be positive, got {self.width}")
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.width:
            raise ValidationError(
                f"{gate.kind.label} on qubits {gate.qubits} exceeds circuit width {self.width}"
            )
        if gate.is_symbolic and gate.theta.index >= self.num_parameters:
            self.num_parameters = gate.theta.index + 1

    def append(self, kind: GateKind, qubits: Sequence[int], theta: Optional[Angle] = None) -> 'Circuit':
        gate = Gate(kind, tuple(qubits), theta)
        self._check(gate)
        self.gates.append(gate)
        return self

    @property
    def is_parameterized(self) -> bool:
        return any(g.is_symbolic for g in self.gates)

    def bind(self, values: Optional[Sequence[float]]) -> 'Circuit':
        """Return a copy with every symbolic angle replaced by its value."""
        values = [] if values is None else [float(v) for v in values]
        if len(values) < self.num_parameters:
            raise BindingError(
                f"circuit has {self.num_parameters} parameters, {len(values)} bound"
            )
        return Circuit(self.width, [g.bound(values) for g in self.gates], 0, self.name)

    def count_ops(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for gate in self.gates:
            counts[gate.kind.label] = counts.get(gate.kind.label, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self.gates)


@dataclass
class ShotDistribution:
    """
    Measured bitstring histogram.

    Bitstring character k is the measured value of qubit k.

    Attributes:
        counts: bitstring -> positive count
        shots: Total number of shots
        width: Bitstring length
    """
    counts: Dict[str, int]
    shots: int
    width: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValidationError(
                f"counts sum to {sum(self.counts.values())}, expected {self.shots} shots"
            )
        for bits, count in self.counts.items():
            if len(bits) != self.width or count <= 0:
                raise ValidationError(f"invalid histogram entry {bits!r}: {count}")

    def probability(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots

    def most_common(self, k: int = 5) -> List[Tuple[str, int]]:
        return sorted(self.counts.items(), key=lambda item: (-item[1], item[0]))[:k]

    def to_dict(self) -> Dict[str, Any]:
        return {'shots': self.shots, 'width': self.width, 'counts': dict(sorted(self.counts.items()))}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ShotDistribution':
        return cls(counts=dict(data['counts']), shots=int(data['shots']), width=int(data['width']))
