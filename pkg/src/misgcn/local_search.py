"""2-improvement local search for independent sets."""

from __future__ import annotations

import heapq
from typing import Iterable

from .graph import ContractViolation, Graph, is_independent_set


class TightnessIndex:
    """Solution membership plus, per vertex, how many neighbors are in the solution."""

    def __init__(self, g: Graph, s: Iterable[int]):
        self.adj = g.adj
        self.in_sol = [False] * g.n
        self.tight = [0] * g.n
        for v in s:
            self.insert(v)

    def insert(self, v: int) -> None:
        self.in_sol[v] = True
        tight = self.tight
        for u in self.adj[v]:
            tight[u] += 1

    def remove(self, v: int) -> None:
        self.in_sol[v] = False
        tight = self.tight
        for u in self.adj[v]:
            tight[u] -= 1

    def recount(self) -> list[int]:
        return [sum(self.in_sol[u] for u in nb) for nb in self.adj]

    def solution(self) -> list[int]:
        return [v for v, inside in enumerate(self.in_sol) if inside]


def _free_insert(idx: TightnessIndex, vertices: Iterable[int]) -> list[int]:
    added = []
    for v in sorted(vertices):
        if not idx.in_sol[v] and idx.tight[v] == 0:
            idx.insert(v)
            added.append(v)
    return added


def _find_two_improvement(idx: TightnessIndex, x: int):
    adj, tight = idx.adj, idx.tight
    cands = sorted(u for u in adj[x] if tight[u] == 1)
    for a in range(len(cands)):
        na = adj[cands[a]]
        for b in range(a + 1, len(cands)):
            if cands[b] not in na:
                return cands[a], cands[b]
    return None


def two_improve(g: Graph, s: Iterable[int], check: bool = False) -> list[int]:
    """Grow ``s`` by free insertions and (1,2)-swaps until neither applies.

    Solution vertices are examined smallest id first and the first improving
    swap is taken. After each swap, newly freed neighbors of the removed vertex
    are inserted, and solution vertices next to any tightness change are queued
    again. ``check`` recounts tightness from scratch after every move.
    """
    s = sorted(set(s))
    if not is_independent_set(g, s):
        raise ContractViolation("two_improve needs an independent set")
    idx = TightnessIndex(g, s)
    adj = idx.adj
    _free_insert(idx, range(g.n))
    heap = idx.solution()
    heapq.heapify(heap)
    queued = set(heap)
    while heap:
        x = heapq.heappop(heap)
        queued.discard(x)
        if not idx.in_sol[x]:
            continue
        move = _find_two_improvement(idx, x)
        if move is None:
            continue
        i, j = move
        idx.remove(x)
        idx.insert(i)
        idx.insert(j)
        added = [i, j] + _free_insert(idx, adj[x])
        if check and idx.tight != idx.recount():
            raise AssertionError("incremental tightness diverged from a recount")
        touched = set(adj[x])
        for v in added:
            touched |= adj[v]
        for z in touched:
            for y in adj[z]:
                if idx.in_sol[y] and y not in queued:
                    heapq.heappush(heap, y)
                    queued.add(y)
        for y in added:
            if y not in queued:
                heapq.heappush(heap, y)
                queued.add(y)
    _free_insert(idx, range(g.n))
    return idx.solution()


def verify_local_optimum(g: Graph, s: Iterable[int]) -> bool:
    """No vertex can be added, and no solution vertex can be swapped for two."""
    s = set(s)
    adj = g.adj
    tight = [sum(1 for u in nb if u in s) for nb in adj]
    if any(v not in s and tight[v] == 0 for v in range(g.n)):
        return False
    for x in s:
        ones = [u for u in adj[x] if tight[u] == 1]
        for a in ones:
            for b in ones:
                if a < b and b not in adj[a]:
                    return False
    return True
