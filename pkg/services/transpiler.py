"""
Basis-gate translation, circuit metrics and the text circuit dump.

Decomposition rules (circuit order, equal up to global phase):
    RY(t)  -> SX, RZ(t + pi), SX, RZ(pi)
    RX(t)  -> RZ(pi/2), SX, RZ(t + pi), SX, RZ(pi/2)
    H      -> RZ(pi/2), SX, RZ(pi/2)
    RZZ(t) -> CX(a, b), RZ(t) on b, CX(a, b)
Basis gates (CX, ID, RZ, SX, X) pass through unchanged.
"""
import logging
import math
import re
from pathlib import Path
from typing import Callable, Dict, List, Tuple, Union

from models.circuit import BASIS_GATES, Angle, Circuit, Gate, GateKind, ParameterRef
from utils.error_handler import ParseError, ReportError, UnsupportedGateError, ValidationError

logger = logging.getLogger(__name__)

_HALF_PI = math.pi / 2


def _shift(theta: Angle, offset: float) -> Angle:
    if isinstance(theta, ParameterRef):
        return theta.shifted(offset)
    return theta + offset


def _decompose_ry(g: Gate) -> List[Gate]:
    q = g.qubits
    return [
        Gate(GateKind.SX, q),
        Gate(GateKind.RZ, q, _shift(g.theta, math.pi)),
        Gate(GateKind.SX, q),
        Gate(GateKind.RZ, q, math.pi),
    ]


def _decompose_rx(g: Gate) -> List[Gate]:
    q = g.qubits
    return [
        Gate(GateKind.RZ, q, _HALF_PI),
        Gate(GateKind.SX, q),
        Gate(GateKind.RZ, q, _shift(g.theta, math.pi)),
        Gate(GateKind.SX, q),
        Gate(GateKind.RZ, q, _HALF_PI),
    ]


def _decompose_h(g: Gate) -> List[Gate]:
    q = g.qubits
    return [Gate(GateKind.RZ, q, _HALF_PI), Gate(GateKind.SX, q), Gate(GateKind.RZ, q, _HALF_PI)]


def _decompose_rzz(g: Gate) -> List[Gate]:
    a, b = g.qubits
    return [Gate(GateKind.CX, (a, b)), Gate(GateKind.RZ, (b,), g.theta), Gate(GateKind.CX, (a, b))]


DECOMPOSITIONS: Dict[GateKind, Callable[[Gate], List[Gate]]] = {
    GateKind.RY: _decompose_ry,
    GateKind.RX: _decompose_rx,
    GateKind.H: _decompose_h,
    GateKind.RZZ: _decompose_rzz,
}


def transpile_to_basis(circ: Circuit) -> Circuit:
    """
    Rewrite a circuit over {CX, ID, RZ, SX, X}.
    Symbolic angles stay symbolic, so the result binds like the input.

    Raises:
        UnsupportedGateError: a gate kind with no rule
    """
    out = Circuit(width=circ.width, num_parameters=circ.num_parameters, name=circ.name)
    for gate in circ.gates:
        if gate.kind in BASIS_GATES:
            out.gates.append(gate)
        elif gate.kind in DECOMPOSITIONS:
            out.gates.extend(DECOMPOSITIONS[gate.kind](gate))
        else:
            raise UnsupportedGateError(gate.kind.label, details="no basis decomposition")
    logger.debug(f"Transpiled {len(circ)} gates into {len(out)} basis gates")
    return out


def circuit_metrics(circ: Circuit) -> Tuple[int, int]:
    """
    (op_count, depth) ignoring ID gates. Depth uses as-soon-as-possible
    layering: a gate lands one layer after the latest gate on its qubits.
    """
    level = [0] * circ.width
    op_count = 0
    for gate in circ.gates:
        if gate.kind == GateKind.ID:
            continue
        op_count += 1
        layer = max(level[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            level[q] = layer
    return op_count, max(level, default=0)


def _format_angle(theta: Angle) -> str:
    if isinstance(theta, ParameterRef):
        return str(theta)
    return repr(float(theta))


def dump_circuit(circ: Circuit) -> str:
    """
    Line-oriented dump: a 'CIRCUIT <width> <num_parameters>' header, then
    one gate per line, e.g. 'RY 0 1.5707963267948966' or 'CX 0 1'.
    """
    lines = [f"CIRCUIT {circ.width} {circ.num_parameters}"]
    for gate in circ.gates:
        fields = [gate.kind.label] + [str(q) for q in gate.qubits]
        if gate.theta is not None:
            fields.append(_format_angle(gate.theta))
        lines.append(' '.join(fields))
    return '\n'.join(lines) + '\n'


_SYMBOLIC = re.compile(r'^(?P<scale>[^*]+)\*p\[(?P<index>\d+)\](?P<offset>[+-].+)?$')


def _parse_angle(text: str, line: int, column: int, path: str) -> Angle:
    match = _SYMBOLIC.match(text)
    try:
        if match:
            offset = float(match.group('offset')) if match.group('offset') else 0.0
            return ParameterRef(int(match.group('index')), float(match.group('scale')), offset)
        return float(text)
    except ValueError:
        raise ParseError(f"malformed angle {text!r}", line, column, path)


def load_circuit(source: Union[str, Path], path: str = '<string>') -> Circuit:
    """
    Parse a dump_circuit() text. `source` is the text itself, or a Path
    to read it from.
    """
    if isinstance(source, Path):
        path = str(source)
        try:
            source = source.read_text(encoding='utf-8')
        except OSError as e:
            raise ValidationError(f"cannot read circuit file {path}", details=str(e))

    circuit = None
    for line_no, line in enumerate(source.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith('#'):
            continue
        columns = [m.start() + 1 for m in re.finditer(r'\S+', line)]

        if circuit is None:
            if fields[0] != 'CIRCUIT' or len(fields) != 3:
                raise ParseError("expected 'CIRCUIT <width> <num_parameters>' header", line_no, 1, path)
            try:
                circuit = Circuit(width=int(fields[1]), num_parameters=int(fields[2]))
            except ValueError:
                raise ParseError("header values must be integers", line_no, columns[1], path)
            continue

        try:
            kind = GateKind.from_label(fields[0])
        except KeyError:
            raise ParseError(f"unknown gate {fields[0]!r}", line_no, 1, path)

        expected = 1 + kind.n_qubits + (1 if kind.parametric else 0)
        if len(fields) != expected:
            raise ParseError(
                f"{kind.label} takes {expected - 1} operands, found {len(fields) - 1}", line_no, 1, path
            )
        try:
            qubits = tuple(int(f) for f in fields[1:1 + kind.n_qubits])
        except ValueError:
            raise ParseError("qubit indices must be integers", line_no, columns[1], path)
        theta = None
        if kind.parametric:
            theta = _parse_angle(fields[-1], line_no, columns[-1], path)
        try:
            circuit.append(kind, qubits, theta)
        except ValidationError as e:
            raise ParseError(e.message, line_no, 1, path)

    if circuit is None:
        raise ParseError("empty circuit dump", 1, 1, path)
    return circuit


def write_circuit(circ: Circuit, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dump_circuit(circ), encoding='utf-8')
    except OSError as e:
        raise ReportError("cannot write circuit dump", path=str(target), details=str(e))
    return target
