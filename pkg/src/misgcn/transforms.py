"""SAT, MVC and MC expressed as MIS, and the maps that bring solutions back."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .graph import ContractViolation, Graph, build_graph, is_independent_set
from .instances import CnfFormula

COMPLEMENT_VERTEX_LIMIT = 20_000


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SatMisMapping:
    graph: Graph
    occurrences: tuple[tuple[int, int], ...]   # vertex -> (clause index, literal)
    num_clauses: int


def sat_to_mis(f: CnfFormula) -> SatMisMapping:
    """One vertex per literal occurrence.

    Occurrences in the same clause form a clique; occurrences of x and -x in
    different clauses are joined.
    """
    occurrences = []
    edges = []
    by_literal: dict[int, list[int]] = defaultdict(list)
    for ci, clause in enumerate(f.clauses):
        first = len(occurrences)
        for lit in clause:
            v = len(occurrences)
            occurrences.append((ci, lit))
            by_literal[lit].append(v)
            edges.extend((u, v) for u in range(first, v))
    for lit, vs in by_literal.items():
        if lit > 0:
            for u in vs:
                for w in by_literal.get(-lit, ()):
                    edges.append((u, w))
    g = build_graph(edges, len(occurrences))
    return SatMisMapping(g, tuple(occurrences), len(f.clauses))


def mis_to_sat_assignment(mapping: SatMisMapping, s: Iterable[int]) -> Optional[dict[int, bool]]:
    """Assignment making every selected literal true, or None if the set is short of one per clause.

    Variables no selected literal mentions are set to False.
    """
    s = sorted(set(s))
    if not is_independent_set(mapping.graph, s):
        raise ContractViolation("vertex set is not independent in the SAT graph")
    if len(s) > mapping.num_clauses:
        raise RuntimeError(f"independent set of size {len(s)} exceeds clause count {mapping.num_clauses}")
    if len(s) < mapping.num_clauses:
        return None
    num_vars = max((abs(lit) for _, lit in mapping.occurrences), default=0)
    assignment = {v: False for v in range(1, num_vars + 1)}
    for v in s:
        lit = mapping.occurrences[v][1]
        assignment[abs(lit)] = lit > 0
    return assignment


def mis_to_mvc(g: Graph, s: Iterable[int]) -> list[int]:
    s = set(s)
    if not is_independent_set(g, s):
        raise ContractViolation("vertex set is not independent")
    return [v for v in range(g.n) if v not in s]


def mvc_to_mis(g: Graph, cover: Iterable[int]) -> list[int]:
    cover = set(cover)
    return [v for v in range(g.n) if v not in cover]


def complement_graph(g: Graph, max_vertices: int = COMPLEMENT_VERTEX_LIMIT) -> Graph:
    if g.n > max_vertices:
        raise ResourceLimitError(
            f"complement of a {g.n}-vertex graph exceeds the {max_vertices}-vertex guard")
    dense = np.ones((g.n, g.n), dtype=bool)
    np.fill_diagonal(dense, False)
    rows = np.repeat(np.arange(g.n), g.degrees)
    dense[rows, g.indices] = False
    iu, ju = np.nonzero(np.triu(dense, k=1))
    return build_graph(np.stack([iu, ju], axis=1), g.n)
