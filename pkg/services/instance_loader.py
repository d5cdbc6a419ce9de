"""
Instance generation, parsing and writing.

Supported file formats:
    - matrix: a size line, then n rows (TSP) or n flow rows, a blank
      line and n distance rows (QAP); whitespace separated, UTF-8.
      The size line is "n" or "tsp n" / "qap n"; untagged files take
      their kind from the row count
    - tsplib: TSPLIB header with EDGE_WEIGHT_TYPE EXPLICIT and
      EDGE_WEIGHT_FORMAT FULL_MATRIX, followed by EDGE_WEIGHT_SECTION
    - qaplib: n, then the flow matrix, then the distance matrix, as a
      free-form stream of numbers
"""
import logging
import re
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from models.instance import PROBLEM_KINDS, ProblemInstance, QapInstance, TspInstance
from utils.error_handler import ParseError, ReportError, ValidationError

logger = logging.getLogger(__name__)

INSTANCE_FORMATS = ('matrix', 'tsplib', 'qaplib')

_TOKEN = re.compile(r'\S+')

# (text, line, column), 1-based positions
Token = Tuple[str, int, int]


def random_instance(kind: str, n: int, seed: int) -> ProblemInstance:
    """
    Seeded random instance with symmetric integer costs in [1, 10].

    Args:
        kind: 'tsp' or 'qap'
        n: Instance size (>= 2)
        seed: Generator seed; (kind, n, seed) fully determines the result

    Returns:
        TspInstance or QapInstance with zero diagonals
    """
    if kind not in PROBLEM_KINDS:
        raise ValidationError(f"unknown problem kind: {kind!r}", details=f"expected one of {PROBLEM_KINDS}")
    if n < 2:
        raise ValidationError(f"instance size must be at least 2, got {n}")

    rng = np.random.default_rng(seed)

    def symmetric_matrix() -> np.ndarray:
        upper = np.triu(rng.integers(1, 11, size=(n, n)), k=1)
        return (upper + upper.T).astype(float)

    name = f"{kind}-n{n}-s{seed}"
    if kind == 'tsp':
        return TspInstance(d=symmetric_matrix(), name=name)
    flow = symmetric_matrix()
    return QapInstance(b=flow, c=symmetric_matrix(), name=name)


def _tokens(text: str) -> Iterator[Token]:
    for line_no, line in enumerate(text.splitlines(), start=1):
        for match in _TOKEN.finditer(line):
            yield match.group(0), line_no, match.start() + 1


def _end_position(text: str) -> Tuple[int, int]:
    lines = text.splitlines()
    if not lines:
        return 1, 1
    return len(lines), len(lines[-1]) + 1


def _number(token: Token, path: str) -> float:
    text, line, column = token
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, found {text!r}", line, column, path)


def _size(token: Token, path: str) -> int:
    text, line, column = token
    try:
        n = int(text)
    except ValueError:
        raise ParseError(f"expected the instance size, found {text!r}", line, column, path)
    if n < 1:
        raise ParseError(f"instance size must be positive, found {n}", line, column, path)
    return n


def _take_tokens(stream: Iterator[Token], count: int, text: str, path: str) -> List[Token]:
    tokens = []
    for _ in range(count):
        token = next(stream, None)
        if token is None:
            line, column = _end_position(text)
            raise ParseError(
                f"unexpected end of file: expected {count} values, found {len(tokens)}",
                line, column, path
            )
        tokens.append(token)
    return tokens


def _take_numbers(stream: Iterator[Token], count: int, text: str, path: str) -> List[float]:
    return [_number(token, path) for token in _take_tokens(stream, count, text, path)]


def _size_line(tokens: List[Token], path: str) -> Tuple[Optional[str], int]:
    """'n' or '<tsp|qap> n' -> (tag, n)."""
    if len(tokens) > 2:
        raise ParseError("size line must be 'n' or '<tsp|qap> n'", tokens[2][1], tokens[2][2], path)
    if len(tokens) == 1:
        return None, _size(tokens[0], path)
    text, line, column = tokens[0]
    tag = text.lower()
    if tag not in PROBLEM_KINDS:
        raise ParseError(f"expected a 'tsp' or 'qap' tag before the size, found {text!r}", line, column, path)
    return tag, _size(tokens[1], path)


def _parse_matrix(text: str, path: str, kind: Optional[str]) -> ProblemInstance:
    lines = text.splitlines()
    rows: List[Tuple[int, List[Token]]] = []
    tag: Optional[str] = None
    n: Optional[int] = None
    for line_no, line in enumerate(lines, start=1):
        tokens = [(m.group(0), line_no, m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        if n is None:
            tag, n = _size_line(tokens, path)
            continue
        rows.append((line_no, tokens))

    if n is None:
        raise ParseError("empty instance file", 1, 1, path)
    if tag is not None and kind is not None and tag != kind:
        raise ValidationError(f"{path} is tagged {tag}, expected {kind}")

    layout = tag or kind
    expected_rows = {'tsp': (n,), 'qap': (2 * n,), None: (n, 2 * n)}[layout]
    if len(rows) not in expected_rows:
        if len(rows) < max(expected_rows):
            line, column = _end_position(text)
            raise ParseError(
                f"unexpected end of file: found {len(rows)} matrix rows for n={n}",
                line, column, path
            )
        line_no, tokens = rows[max(expected_rows)]
        raise ParseError("unexpected data after the last matrix row", line_no, tokens[0][2], path)

    # untagged: n rows then a blank separator reads as a QAP cut before its distance block
    if layout is None and len(rows) == n:
        last_line = rows[-1][0]
        if any(not line.strip() for line in lines[last_line:]):
            line, column = _end_position(text)
            raise ParseError(
                f"ambiguous layout: {n} rows followed by a blank line; "
                "tag the size line with 'tsp' or 'qap'",
                line, column, path
            )

    matrix_rows = []
    for index, (line_no, tokens) in enumerate(rows):
        if len(tokens) != n:
            if index == len(rows) - 1 and len(tokens) < n:
                line, column = _end_position(text)
                raise ParseError(f"truncated row: expected {n} values, found {len(tokens)}", line, column, path)
            raise ValidationError(
                f"row has {len(tokens)} values, expected {n}",
                details=f"{path}: line {line_no}"
            )
        matrix_rows.append([_number(token, path) for token in tokens])

    name = Path(path).stem
    if len(rows) == n:
        return TspInstance(d=matrix_rows, name=name)
    return QapInstance(b=matrix_rows[:n], c=matrix_rows[n:], name=name)


def _parse_tsplib(text: str, path: str) -> TspInstance:
    stream = _tokens(text)
    header = {}
    name = Path(path).stem
    lines = text.splitlines()

    # Header: KEY : VALUE lines up to EDGE_WEIGHT_SECTION
    section_line = None
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.upper().startswith('EDGE_WEIGHT_SECTION'):
            section_line = line_no
            break
        if ':' not in stripped:
            raise ParseError(f"expected 'KEY : VALUE', found {stripped!r}", line_no, 1, path)
        key, value = (part.strip() for part in stripped.split(':', 1))
        header[key.upper()] = (value, line_no)

    if section_line is None:
        line, column = _end_position(text)
        raise ParseError("missing EDGE_WEIGHT_SECTION", line, column, path)
    if 'DIMENSION' not in header:
        raise ParseError("missing DIMENSION entry", 1, 1, path)

    weight_type, type_line = header.get('EDGE_WEIGHT_TYPE', ('', 1))
    if weight_type.upper() != 'EXPLICIT':
        raise ParseError(
            f"only EDGE_WEIGHT_TYPE EXPLICIT is supported, found {weight_type!r}", type_line, 1, path
        )
    weight_format, format_line = header.get('EDGE_WEIGHT_FORMAT', ('', 1))
    if weight_format.upper() != 'FULL_MATRIX':
        raise ParseError(
            f"only EDGE_WEIGHT_FORMAT FULL_MATRIX is supported, found {weight_format!r}", format_line, 1, path
        )

    dim_value, dim_line = header['DIMENSION']
    n = _size((dim_value, dim_line, 1), path)
    if 'NAME' in header:
        name = header['NAME'][0]

    # Skip header tokens up to and including the section keyword
    for token in stream:
        if token[1] == section_line:
            break
    tokens = _take_tokens(
        (t for t in stream if t[0].upper() != 'EOF'), n * n, text, path
    )
    values = [_number(token, path) for token in tokens]
    for i in range(n):
        diagonal, line, column = tokens[i * n + i]
        if values[i * n + i] != 0:
            raise ParseError(f"diagonal entry {i} must be 0, found {diagonal}", line, column, path)
    return TspInstance(d=np.array(values).reshape(n, n), name=name)


def _parse_qaplib(text: str, path: str) -> QapInstance:
    stream = _tokens(text)
    first = next(stream, None)
    if first is None:
        raise ParseError("empty instance file", 1, 1, path)
    n = _size(first, path)
    flow = _take_numbers(stream, n * n, text, path)
    dist = _take_numbers(stream, n * n, text, path)
    extra = next(stream, None)
    if extra is not None:
        raise ParseError(f"unexpected data after the distance matrix: {extra[0]!r}", extra[1], extra[2], path)
    return QapInstance(
        b=np.array(flow).reshape(n, n),
        c=np.array(dist).reshape(n, n),
        name=Path(path).stem
    )


def parse_instance(path: Union[str, Path], fmt: str = 'matrix',
                   kind: Optional[str] = None) -> ProblemInstance:
    """
    Read an instance file.

    Args:
        path: File path
        fmt: 'matrix', 'tsplib' or 'qaplib'
        kind: Optional 'tsp'/'qap' hint for the matrix format; untagged files
              without a hint take their kind from the row count

    Returns:
        The parsed instance

    Raises:
        ParseError: malformed or truncated file (carries line/column)
        ValidationError: dimension or matrix-invariant violations
    """
    if fmt not in INSTANCE_FORMATS:
        raise ValidationError(f"unknown instance format: {fmt!r}", details=f"expected one of {INSTANCE_FORMATS}")
    if kind is not None and kind not in PROBLEM_KINDS:
        raise ValidationError(f"unknown problem kind: {kind!r}")

    path = str(path)
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ValidationError(f"cannot read instance file {path}", details=str(e))

    if fmt == 'matrix':
        inst = _parse_matrix(text, path, kind)
    elif fmt == 'tsplib':
        inst = _parse_tsplib(text, path)
    else:
        inst = _parse_qaplib(text, path)

    if kind is not None and inst.kind != kind:
        raise ValidationError(f"{path} holds a {inst.kind} instance, expected {kind}")

    logger.info(f"Loaded {inst!r} from {path} ({fmt})")
    return inst


def _format_value(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _format_rows(matrix: np.ndarray) -> List[str]:
    return [' '.join(_format_value(v) for v in row) for row in matrix]


def write_instance(inst: ProblemInstance, path: Union[str, Path]) -> Path:
    """
    Write an instance in the plain matrix format (LF line endings).
    parse_instance(write_instance(x)) reproduces x exactly.
    """
    lines = [f"{inst.kind} {inst.n}"]
    if isinstance(inst, TspInstance):
        lines += _format_rows(inst.d)
    else:
        lines += _format_rows(inst.b) + [''] + _format_rows(inst.c)

    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8', newline='\n') as f:
            f.write('\n'.join(lines) + '\n')
    except OSError as e:
        raise ReportError("cannot write instance file", path=str(target), details=str(e))

    logger.info(f"Wrote {inst!r} to {target}")
    return target
