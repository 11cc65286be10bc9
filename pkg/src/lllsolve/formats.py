"""Text formats: DIMACS CNF and a line-per-edge hypergraph format."""

from __future__ import annotations

from .applications import CnfFormula, Hypergraph
from .errors import InvalidInstanceError, ParseError


def detect_format(text: str) -> str:
    """``"cnf"`` or ``"hypergraph"`` from the first header token."""
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[:2] == ["p", "cnf"]:
            return "cnf"
        if tokens[0] == "h":
            return "hypergraph"
        raise ParseError("expected a 'p cnf' or 'h' header", number)
    raise ParseError("no header found", 0)


def _int(token: str, number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"not an integer: {token!r}", number) from None


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    current: list = []
    number = 0
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "%":
            break
        if tokens[0] == "p":
            if header is not None:
                raise ParseError("second header", number)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError(f"malformed header {line.strip()!r}", number)
            header = (_int(tokens[2], number), _int(tokens[3], number))
            if header[0] < 0 or header[1] < 0:
                raise ParseError("negative counts in header", number)
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", number)
        for token in tokens:
            lit = _int(token, number)
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", number)
                if len({abs(v) for v in current}) != len(current):
                    raise ParseError("clause mentions a variable twice", number)
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(f"literal {lit} out of range 1..{header[0]}", number)
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", 0)
    if current:
        raise ParseError("last clause is not terminated by 0", number)
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}", number)
    return CnfFormula(header[0], tuple(clauses))


def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str) -> Hypergraph:
    header = None
    edges = []
    number = 0
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "h":
            if header is not None:
                raise ParseError("second header", number)
            if len(tokens) != 3:
                raise ParseError(f"malformed header {line.strip()!r}", number)
            header = (_int(tokens[1], number), _int(tokens[2], number))
            continue
        if header is None:
            raise ParseError("edge before the 'h' header", number)
        edge = tuple(_int(t, number) for t in tokens)
        if len(set(edge)) != len(edge):
            raise ParseError("edge repeats a vertex", number)
        if any(not 1 <= v <= header[0] for v in edge):
            raise ParseError(f"vertex out of range 1..{header[0]}", number)
        if len(edge) < 2:
            raise ParseError("edge needs at least 2 vertices", number)
        edges.append(edge)
    if header is None:
        raise ParseError("missing 'h' header", 0)
    if len(edges) != header[1]:
        raise ParseError(f"header announces {header[1]} edges, found {len(edges)}", number)
    try:
        return Hypergraph(header[0], tuple(edges))
    except InvalidInstanceError as exc:
        raise ParseError(str(exc), number) from exc


def emit_hypergraph(hg: Hypergraph) -> str:
    lines = [f"h {hg.num_vertices} {len(hg.edges)}"]
    lines += [" ".join(str(v) for v in edge) for edge in hg.edges]
    return "\n".join(lines) + "\n"
