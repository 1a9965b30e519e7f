"""Readers and writers: DIMACS CNF, SNAP edge lists, DIMACS graphs, models, reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Union

import numpy as np

from .graph import Graph, build_graph, is_clique, is_independent_set, is_vertex_cover

Text = Union[str, bytes]

MODEL_MAGIC = "misgcn-model"
MODEL_VERSION = 1
REPORT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, c in enumerate(self.clauses):
            if not c:
                raise ValueError(f"clause {i} is empty")
            if len(set(c)) != len(c):
                raise ValueError(f"clause {i} repeats a literal")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {i}: literal {lit} out of range")

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment.get(abs(l), False) == (l > 0) for l in c) for c in self.clauses)


def _decode(text: Text) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8 text ({exc.reason})") from None
    return text


def parse_cnf(text: Text) -> CnfFormula:
    """Parse DIMACS CNF. Clauses may span lines; each ends with a 0 token."""
    lines = _decode(text).splitlines()
    num_vars = num_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    start_line = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer count in problem line", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise ParseError("negative count in problem line", lineno)
            continue
        if line.startswith("%"):
            # SATLIB files end with a '%' trailer
            break
        if num_vars is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                clauses.append(_finish_clause(current, start_line))
                current, start_line = [], None
                continue
            if abs(lit) > num_vars:
                raise ParseError(f"literal {lit} exceeds {num_vars} variables", lineno)
            if start_line is None:
                start_line = lineno
            current.append(lit)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        clauses.append(_finish_clause(current, start_line))
    if len(clauses) != num_clauses:
        raise ParseError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def _finish_clause(lits: list[int], lineno: Optional[int]) -> tuple[int, ...]:
    clause = tuple(dict.fromkeys(lits))
    seen = set(clause)
    if any(-l in seen for l in clause):
        raise ParseError("tautological clause (contains x and -x)", lineno)
    return clause


def write_cnf(f: CnfFormula, comment: str = "") -> str:
    out = [f"c {line}" for line in comment.splitlines()]
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    out.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(out) + "\n"


def parse_assignment(text: Text) -> dict[int, bool]:
    """One signed literal per line (a trailing 0 and 'c' comments are tolerated)."""
    assignment = {}
    for lineno, raw in enumerate(_decode(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit:
                assignment[abs(lit)] = lit > 0
    return assignment


def write_assignment(assignment: dict[int, bool]) -> str:
    return "".join(f"{v if val else -v}\n" for v, val in sorted(assignment.items()))


def parse_edge_list_ids(text: Text) -> tuple[Graph, list[int]]:
    """SNAP edge list plus the original id of every dense vertex index.

    Ids are compacted in order of first appearance.
    """
    ids: dict[int, int] = {}
    edges = []
    for lineno, raw in enumerate(_decode(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ParseError("expected 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("negative vertex id", lineno)
        a = ids.setdefault(u, len(ids))
        b = ids.setdefault(v, len(ids))
        edges.append((a, b))
    return build_graph(edges, len(ids)), list(ids)


def parse_edge_list(text: Text) -> Graph:
    return parse_edge_list_ids(text)[0]


def write_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def parse_dimacs_graph(text: Text) -> Graph:
    """DIMACS 'p edge n m' with 1-indexed 'e u v' lines."""
    n = m = None
    edges = []
    for lineno, raw in enumerate(_decode(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise ParseError("expected 'p edge <n> <m>'", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer count in problem line", lineno) from None
        elif parts[0] == "e":
            if n is None:
                raise ParseError("edge before problem line", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except (ValueError, IndexError):
                raise ParseError(f"bad edge line {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"vertex out of range 1..{n}", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unknown line type {parts[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'p edge' header")
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    return build_graph(edges, n)


def write_dimacs_graph(g: Graph) -> str:
    out = [f"p edge {g.n} {g.m}"]
    out.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(out) + "\n"


# --- model files ---------------------------------------------------------

def write_model(model, binary: bool = True) -> bytes:
    """Versioned text header followed by theta0/theta1 of each layer, row-major."""
    header = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"format {'binary' if binary else 'decimal'}",
        f"layers {model.num_layers}",
        "widths " + " ".join(map(str, model.widths)),
    ]
    for key, value in sorted(model.meta.items()):
        header.append(f"meta {key} {value}")
    header.append("end")
    head = ("\n".join(header) + "\n").encode("ascii")
    mats = [w for pair in zip(model.theta0, model.theta1) for w in pair]
    if binary:
        body = b"".join(np.ascontiguousarray(w, dtype="<f8").tobytes() for w in mats)
    else:
        body = "".join(
            " ".join(repr(float(x)) for x in row) + "\n" for w in mats for row in w
        ).encode("ascii")
    return head + body


def read_model(data: bytes):
    from .gcn import GcnModel

    lines = []
    pos = 0
    while True:
        end = data.find(b"\n", pos)
        if end < 0:
            raise ParseError("truncated model header")
        line = data[pos:end].decode("ascii", errors="replace")
        pos = end + 1
        if line == "end":
            break
        lines.append(line)
    if not lines or not lines[0].startswith(MODEL_MAGIC):
        raise ParseError("not a model file", 1)
    try:
        version = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError("bad version field", 1) from None
    if version != MODEL_VERSION:
        raise ParseError(f"unsupported model version {version}", 1)
    fields: dict[str, list[str]] = {}
    meta = {}
    for line in lines[1:]:
        key, *rest = line.split()
        if key == "meta":
            meta[rest[0]] = " ".join(rest[1:])
        else:
            fields[key] = rest
    try:
        fmt = fields["format"][0]
        num_layers = int(fields["layers"][0])
        widths = [int(x) for x in fields["widths"]]
    except (KeyError, IndexError, ValueError):
        raise ParseError("incomplete model header") from None
    if len(widths) != num_layers + 1:
        raise ParseError(f"{num_layers} layers need {num_layers + 1} widths, got {len(widths)}")
    shapes = [(widths[l], widths[l + 1]) for l in range(num_layers) for _ in range(2)]
    body = data[pos:]
    mats = []
    if fmt == "binary":
        offset = 0
        for r, c in shapes:
            size = r * c * 8
            if offset + size > len(body):
                raise ParseError("truncated weight data")
            mats.append(np.frombuffer(body[offset:offset + size], dtype="<f8").reshape(r, c).astype(np.float64))
            offset += size
        if offset != len(body):
            raise ParseError("trailing bytes after weight data")
    elif fmt == "decimal":
        rows = body.decode("ascii").splitlines()
        i = 0
        for r, c in shapes:
            if i + r > len(rows):
                raise ParseError("truncated weight data")
            try:
                block = np.array([[float(x) for x in rows[i + k].split()] for k in range(r)])
            except ValueError:
                raise ParseError("non-numeric weight") from None
            if block.shape != (r, c):
                raise ParseError(f"weight block has shape {block.shape}, expected {(r, c)}")
            mats.append(block)
            i += r
        if any(row.strip() for row in rows[i:]):
            raise ParseError("trailing data after weight blocks")
    else:
        raise ParseError(f"unknown weight format {fmt!r}")
    return GcnModel(widths, mats[0::2], mats[1::2], meta=meta)


# --- solution reports -----------------------------------------------------

@dataclass
class SolutionReport:
    problem: str                      # mis | mvc | mc | sat
    instance: str
    objective: int
    vertices: list[int] = field(default_factory=list)
    assignment: Optional[list[int]] = None   # signed literals, SAT only
    solved: Optional[bool] = None            # SAT only
    wall_time: float = 0.0
    seed: int = 0
    config: dict[str, Any] = field(default_factory=dict)
    vertex_ids: Optional[list[int]] = None   # original ids when the input was re-indexed


class UnverifiedSolution(ValueError):
    pass


def verify_report(report: SolutionReport, instance) -> bool:
    """Check the reported set or assignment against the instance it claims to solve."""
    if report.problem == "sat":
        from .transforms import sat_to_mis

        if report.solved:
            if report.assignment is None:
                return False
            assign = {abs(l): l > 0 for l in report.assignment}
            if set(assign) != set(range(1, instance.num_vars + 1)):
                return False
            return instance.satisfied_by(assign)
        g = sat_to_mis(instance).graph
        return len(report.vertices) == report.objective and is_independent_set(g, report.vertices)
    vs = report.vertices
    if len(set(vs)) != len(vs) or len(vs) != report.objective:
        return False
    if any(v < 0 or v >= instance.n for v in vs):
        return False
    check = {"mis": is_independent_set, "mvc": is_vertex_cover, "mc": is_clique}[report.problem]
    return check(instance, vs)


def write_solution(report: SolutionReport, instance) -> str:
    if not verify_report(report, instance):
        raise UnverifiedSolution(f"{report.problem} solution for {report.instance} does not verify")
    doc = {"version": REPORT_VERSION, **asdict(report)}
    return json.dumps(doc, indent=2) + "\n"


def read_solution(text: Text) -> SolutionReport:
    try:
        doc = json.loads(_decode(text))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or doc.pop("version", None) != REPORT_VERSION:
        raise ParseError("not a version-1 solution report")
    try:
        return SolutionReport(**doc)
    except TypeError as exc:
        raise ParseError(str(exc)) from None

