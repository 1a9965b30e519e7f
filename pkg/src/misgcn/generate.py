"""Planted-solution random 3-SAT instances."""

from __future__ import annotations

import numpy as np

from .instances import CnfFormula


def planted_ksat(num_vars: int, num_clauses: int, rng: np.random.Generator, k: int = 3
                 ) -> tuple[CnfFormula, dict[int, bool]]:
    """Draw a hidden assignment, then clauses over k distinct variables that it satisfies.

    Clauses are rejection-sampled, so each is uniform among the satisfied ones.
    """
    if num_vars < k:
        raise ValueError(f"need at least {k} variables")
    hidden = rng.random(num_vars) < 0.5
    clauses = []
    while len(clauses) < num_clauses:
        vars_ = rng.choice(num_vars, size=k, replace=False)
        signs = rng.random(k) < 0.5
        if np.any(hidden[vars_] == signs):
            clauses.append(tuple(int(v + 1) if s else -int(v + 1) for v, s in zip(vars_, signs)))
    assignment = {v + 1: bool(hidden[v]) for v in range(num_vars)}
    return CnfFormula(num_vars, tuple(clauses)), assignment


def random_ksat(num_vars: int, num_clauses: int, rng: np.random.Generator, k: int = 3) -> CnfFormula:
    """Uniform random k-SAT (no planted solution; may be unsatisfiable)."""
    clauses = []
    for _ in range(num_clauses):
        vars_ = rng.choice(num_vars, size=k, replace=False)
        signs = rng.random(k) < 0.5
        clauses.append(tuple(int(v + 1) if s else -int(v + 1) for v, s in zip(vars_, signs)))
    return CnfFormula(num_vars, tuple(clauses))
