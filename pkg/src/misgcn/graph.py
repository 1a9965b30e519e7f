"""Immutable undirected graphs, vertex labellings and the normalized adjacency."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class MalformedInputError(ValueError):
    """Raised when an edge list or index set refers to vertices that do not exist."""


class ContractViolation(ValueError):
    """Raised when an operation is called with arguments breaking its precondition."""


class Label(IntEnum):
    UNLABELLED = -1
    ZERO = 0
    ONE = 1


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as CSR with sorted neighbor lists.

    ``m`` counts each undirected edge once; ``indices`` stores both directions.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def m(self) -> int:
        return int(self.indices.shape[0]) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def adj(self) -> list[frozenset[int]]:
        """Neighbor sets as Python frozensets, for the combinatorial routines."""
        ptr = self.indptr.tolist()
        idx = self.indices.tolist()
        return [frozenset(idx[ptr[v]:ptr[v + 1]]) for v in range(self.n)]

    def edges(self) -> list[tuple[int, int]]:
        """Canonical edge list, each edge once as (u, v) with u < v, sorted."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        mask = rows < self.indices
        return list(zip(rows[mask].tolist(), self.indices[mask].tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.shape[0] and nb[i] == v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self) -> int:
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(edge_list: Iterable[tuple[int, int]], n: int) -> Graph:
    """Canonicalize an edge list: drop self-loops, merge duplicates and orientations."""
    if n < 0:
        raise MalformedInputError(f"negative vertex count {n}")
    pairs = np.asarray(list(edge_list), dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        bad = pairs[(pairs < 0).any(axis=1) | (pairs >= n).any(axis=1)][0]
        raise MalformedInputError(f"edge ({bad[0]}, {bad[1]}) out of range for n={n}")
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    both = np.concatenate([pairs, pairs[:, ::-1]])
    if both.size:
        keys = np.unique(both[:, 0] * n + both[:, 1])
        rows, cols = keys // n, keys % n
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return Graph(n, indptr, cols.astype(np.int64))


def graph_from_adjacency(adj: Sequence[Iterable[int]]) -> Graph:
    """Build from per-vertex neighbor iterables (assumed symmetric)."""
    return build_graph(((u, v) for u, nb in enumerate(adj) for v in nb if u < v), len(adj))


def normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """D^-1/2 A D^-1/2 as a sparse matrix; isolated vertices get an all-zero row."""
    deg = g.degrees.astype(np.float64)
    inv_sqrt = np.zeros_like(deg)
    np.divide(1.0, np.sqrt(deg), out=inv_sqrt, where=deg > 0)
    rows = np.repeat(np.arange(g.n), g.degrees)
    data = inv_sqrt[rows] * inv_sqrt[g.indices]
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph on ``keep`` (re-indexed in ascending order) and the old->new map."""
    kept = np.unique(np.fromiter(keep, dtype=np.int64))
    if kept.size and (kept[0] < 0 or kept[-1] >= g.n):
        raise MalformedInputError("keep set out of range")
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[kept] = np.arange(kept.size)
    counts = g.degrees[kept]
    starts = g.indptr[kept]
    # gather neighbor slices of kept vertices, then filter out dropped endpoints
    offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    nbrs = g.indices[np.arange(counts.sum()) + offsets] if counts.size else np.zeros(0, np.int64)
    src = np.repeat(np.arange(kept.size), counts)
    mapped = new_id[nbrs]
    ok = mapped >= 0
    src, mapped = src[ok], mapped[ok]
    indptr = np.zeros(kept.size + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=kept.size), out=indptr[1:])
    sub = Graph(int(kept.size), indptr, mapped.astype(np.int64))
    return sub, dict(zip(kept.tolist(), range(kept.size)))


def is_independent_set(g: Graph, s: Iterable[int]) -> bool:
    members = np.zeros(g.n, dtype=bool)
    idx = np.fromiter(s, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise MalformedInputError("vertex set out of range")
    members[idx] = True
    rows = np.repeat(members, g.degrees)
    return not bool(np.any(rows & members[g.indices]))


def is_vertex_cover(g: Graph, s: Iterable[int]) -> bool:
    members = np.zeros(g.n, dtype=bool)
    members[np.fromiter(s, dtype=np.int64)] = True
    rows = np.repeat(members, g.degrees)
    return bool(np.all(rows | members[g.indices]))


def is_clique(g: Graph, s: Iterable[int]) -> bool:
    vs = sorted(set(s))
    adj = g.adj
    return all(vs[j] in adj[vs[i]] for i in range(len(vs)) for j in range(i + 1, len(vs)))


def new_labelling(n: int) -> np.ndarray:
    return np.full(n, Label.UNLABELLED, dtype=np.int8)


def labelling_from_set(n: int, s: Iterable[int]) -> np.ndarray:
    """Complete labelling with ``s`` as ONE and everything else ZERO."""
    lab = np.zeros(n, dtype=np.int8)
    lab[np.fromiter(s, dtype=np.int64)] = Label.ONE
    return lab


def is_complete(labelling: np.ndarray) -> bool:
    return not bool(np.any(labelling == Label.UNLABELLED))


def ones(labelling: np.ndarray) -> list[int]:
    return np.flatnonzero(labelling == Label.ONE).tolist()


def permute_graph(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel vertex v as perm[v]."""
    p = np.asarray(perm)
    return build_graph(((int(p[u]), int(p[v])) for u, v in g.edges()), g.n)


# Small named graphs used throughout tests and examples.

def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> Graph:
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def complete_graph(n: int) -> Graph:
    return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)], n)


def star_graph(leaves: int) -> Graph:
    """Vertex 0 is the center."""
    return build_graph([(0, i) for i in range(1, leaves + 1)], leaves + 1)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(outer + spokes + inner, 10)


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.shape[0]) < p
    return build_graph(np.stack([iu[mask], ju[mask]], axis=1), n)
