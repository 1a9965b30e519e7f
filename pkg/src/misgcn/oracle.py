"""Exact answers at desk scale: branch-and-bound MIS, subset enumeration, DPLL."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .graph import Graph, is_independent_set


@dataclass
class OracleResult:
    alpha: Optional[int]          # None when the expansion budget ran out
    witness: list[int]
    expansions: int
    seconds: float

    @property
    def known(self) -> bool:
        return self.alpha is not None


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _neighbor_masks(g: Graph) -> list[int]:
    masks = []
    for v in range(g.n):
        m = 0
        for u in g.neighbors(v).tolist():
            m |= 1 << u
        masks.append(m)
    return masks


def _clique_cover(cand: int, nb: list[int]) -> list[int]:
    """Greedy partition of ``cand`` into cliques (as masks); each holds at most
    one vertex of an independent set."""
    cliques = []
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        clique = low
        common = rest & nb[v]
        while common:
            lw = common & -common
            w = lw.bit_length() - 1
            rest ^= lw
            clique |= lw
            common &= nb[w] & ~lw
        cliques.append(clique)
    return cliques


def _greedy_min_degree(cand: int, nb: list[int]) -> list[int]:
    chosen = []
    while cand:
        v = min(_bits(cand), key=lambda x: ((nb[x] & cand).bit_count(), x))
        chosen.append(v)
        cand &= ~(nb[v] | (1 << v))
    return chosen


def exact_mis(g: Graph, limit: int = 2_000_000) -> OracleResult:
    """Maximum independent set by include/exclude branching on a max-degree vertex.

    Pruned with a greedy clique-cover upper bound; returns ``alpha=None`` when more
    than ``limit`` nodes would be expanded. When the bound leaves no slack, every
    clique of the cover must supply a vertex, so singleton cliques are taken
    without branching.
    """
    start = time.perf_counter()
    nb = _neighbor_masks(g)
    full = (1 << g.n) - 1
    best = _greedy_min_degree(full, nb)
    expansions = 0

    class Exhausted(Exception):
        pass

    def rec(cand: int, chosen: list[int]) -> None:
        nonlocal best, expansions
        expansions += 1
        if expansions > limit:
            raise Exhausted
        if not cand:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        forced = []
        while True:
            cover = _clique_cover(cand, nb)
            slack = len(chosen) + len(forced) + len(cover) - len(best) - 1
            if slack < 0:
                return
            singles = [c for c in cover if not c & (c - 1)] if slack == 0 else []
            if not singles:
                break
            for c in singles:
                if cand & c:
                    forced.append(c.bit_length() - 1)
                    cand &= ~(nb[forced[-1]] | c)
                # a singleton knocked out by another: the bound drops below best
        chosen = chosen + forced
        if not cand:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        v, dv = -1, -1
        for x in _bits(cand):
            d = (nb[x] & cand).bit_count()
            if d > dv:
                v, dv = x, d
        if dv == 0:
            rec(0, chosen + list(_bits(cand)))
            return
        rec(cand & ~(nb[v] | (1 << v)), chosen + [v])
        rec(cand & ~(1 << v), chosen)

    try:
        rec(full, [])
    except Exhausted:
        return OracleResult(None, [], expansions, time.perf_counter() - start)
    witness = sorted(best)
    assert is_independent_set(g, witness)
    return OracleResult(len(witness), witness, expansions, time.perf_counter() - start)


def brute_force_mis(g: Graph) -> tuple[int, list[int]]:
    """Scan every vertex subset; meant as a meta-oracle for n <= 16.

    A subset is independent iff it is without its lowest vertex and that vertex
    has no neighbor in it, so one pass over all masks in increasing order decides
    every subset.
    """
    if g.n > 22:
        raise ValueError("subset enumeration is limited to n <= 22")
    nb = _neighbor_masks(g)
    size = [0] * (1 << g.n)       # |mask| if independent, else -1
    best_mask, best_size = 0, 0
    for mask in range(1, 1 << g.n):
        low = mask & -mask
        rest = mask ^ low
        if size[rest] < 0 or nb[low.bit_length() - 1] & rest:
            size[mask] = -1
            continue
        size[mask] = size[rest] + 1
        if size[mask] > best_size:
            best_mask, best_size = mask, size[mask]
    return best_size, list(_bits(best_mask))


def dpll_sat(formula) -> Optional[dict[int, bool]]:
    """Satisfying assignment (variable -> bool, every variable present) or None."""
    clauses = [list(c) for c in formula.clauses]

    def propagate(cls, assign):
        cls = [list(c) for c in cls]
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is None:
                return cls, assign
            assign = dict(assign)
            assign[abs(unit)] = unit > 0
            cls = _simplify(cls, unit)
            if cls is None:
                return None, assign

    def solve(cls, assign):
        cls, assign = propagate(cls, assign)
        if cls is None:
            return None
        if not cls:
            return assign
        # branch on the most frequent variable
        counts: dict[int, int] = {}
        for c in cls:
            for lit in c:
                counts[abs(lit)] = counts.get(abs(lit), 0) + 1
        var = max(sorted(counts), key=lambda x: counts[x])
        for lit in (var, -var):
            reduced = _simplify(cls, lit)
            if reduced is not None:
                result = solve(reduced, {**assign, var: lit > 0})
                if result is not None:
                    return result
        return None

    result = solve(clauses, {})
    if result is None:
        return None
    return {v: result.get(v, False) for v in range(1, formula.num_vars + 1)}


def _simplify(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = [x for x in c if x != -lit]
            if not c:
                return None
        out.append(c)
    return out
