"""MIS-preserving kernelization (isolated, pendant, folding, unconfined, twin) and lifting.

The reducer works on a mutable adjacency-set copy of the graph. Vertices created
by folding and twin gadgets get fresh ids past every id used so far, so every
trace event can be replayed against ids that never collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .graph import ContractViolation, Graph, graph_from_adjacency, is_independent_set


@dataclass(frozen=True)
class IsolatedInclude:
    v: int


@dataclass(frozen=True)
class Pendant:
    v: int
    neighbors: tuple[int, ...]


@dataclass(frozen=True)
class Fold:
    u: int
    v: int
    w: int
    merged: int


@dataclass(frozen=True)
class Unconfined:
    v: int


@dataclass(frozen=True)
class Twin:
    u: int
    v: int
    neighbors: tuple[int, ...]
    gadget: Optional[int]   # None: u and v were included directly


Event = Union[IsolatedInclude, Pendant, Fold, Unconfined, Twin]

# size gained in the original graph per event, independent of the kernel solution
_OFFSET = {IsolatedInclude: 1, Pendant: 1, Fold: 1, Unconfined: 0, Twin: 2}


@dataclass
class ReductionTrace:
    original_n: int
    events: list[Event] = field(default_factory=list)
    kernel: Optional[Graph] = None
    kernel_ids: list[int] = field(default_factory=list)   # kernel index -> internal id

    @property
    def offset(self) -> int:
        return sum(_OFFSET[type(e)] for e in self.events)


class KernelState:
    """Mutable working graph for the reduction rules."""

    def __init__(self, adj: dict[int, set[int]], next_id: int):
        self.adj = adj
        self.next_id = next_id
        # vertices found confined since their surroundings last changed
        self.confined: set[int] = set()
        self._by_degree: dict[int, set[int]] = {d: set() for d in range(4)}
        for v, nb in adj.items():
            if len(nb) < 4:
                self._by_degree[len(nb)].add(v)

    @classmethod
    def from_graph(cls, g: Graph) -> "KernelState":
        return cls({v: set(nb) for v, nb in enumerate(g.adj)}, g.n)

    def graph(self) -> tuple[Graph, list[int]]:
        """Compact the current state into a Graph; returns it with kernel index -> id."""
        ids = sorted(self.adj)
        pos = {v: i for i, v in enumerate(ids)}
        return graph_from_adjacency([[pos[u] for u in self.adj[v]] for v in ids]), ids

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def _set_degree(self, v: int, old: int, new: int) -> None:
        if old < 4:
            self._by_degree[old].discard(v)
        if new < 4:
            self._by_degree[new].add(v)

    def _invalidate(self, touched: Iterable[int]) -> None:
        confined, adj = self.confined, self.adj
        if not confined:
            return
        for t in touched:
            confined.discard(t)
            nb = adj.get(t)
            if nb:
                confined.difference_update(nb)

    def remove(self, vs: Iterable[int]) -> None:
        vs = set(vs)
        touched = set()
        for v in vs:
            nb = self.adj.pop(v)
            self.confined.discard(v)
            self._set_degree(v, len(nb), 99)
            for u in nb:
                if u in vs:
                    continue
                s = self.adj[u]
                s.discard(v)
                touched.add(u)
                self._set_degree(u, len(s) + 1, len(s))
        for v in vs:
            touched.discard(v)
        self._invalidate(touched)

    def add(self, nbrs: Iterable[int]) -> int:
        v = self.next_id
        self.next_id += 1
        nb = set(nbrs)
        self.adj[v] = nb
        self._set_degree(v, 99, len(nb))
        for u in nb:
            s = self.adj[u]
            s.add(v)
            self._set_degree(u, len(s) - 1, len(s))
        self._invalidate([v, *nb])
        return v

    def with_degree(self, d: int) -> set[int]:
        return self._by_degree[d]


def _as_state(g: Union[Graph, KernelState]) -> KernelState:
    return KernelState.from_graph(g) if isinstance(g, Graph) else g


# --- rule predicates -------------------------------------------------------

def is_foldable(state: KernelState, v: int) -> bool:
    nb = state.adj[v]
    if len(nb) != 2:
        return False
    u, w = nb
    return w not in state.adj[u]


def is_unconfined(state: KernelState, v: int) -> bool:
    """Grow S from {v} through neighbors with one edge into S and one outside neighbor.

    A neighbor u of S with exactly one neighbor in S minimizes the number of its
    neighbors outside N[S] (ties: smallest id). None outside: v is unconfined.
    Exactly one (w): S gains w and the search repeats. Otherwise v is confined.
    """
    adj = state.adj
    s = {v}
    ns = set(adj[v])
    while True:
        best_u, best_out = None, None
        for u in ns:
            nu = adj[u]
            if len(nu & s) != 1:
                continue
            out = nu - s - ns
            if best_u is None or (len(out), u) < (len(best_out), best_u):
                best_u, best_out = u, out
                if not out:
                    return True
        if best_u is None or len(best_out) > 1:
            return False
        (w,) = best_out
        s.add(w)
        ns |= adj[w]
        ns -= s


def find_twin(state: KernelState, u: int) -> Optional[int]:
    nb = state.adj[u]
    if len(nb) != 3:
        return None
    first = min(nb)
    cands = [x for x in state.adj[first] if x != u and len(state.adj[x]) == 3 and state.adj[x] == nb]
    return min(cands) if cands else None


# --- rule applications -----------------------------------------------------

def apply_isolated(g, v: int) -> tuple[KernelState, IsolatedInclude]:
    state = _as_state(g)
    if state.degree(v) != 0:
        raise ContractViolation(f"vertex {v} is not isolated")
    state.remove([v])
    return state, IsolatedInclude(v)


def apply_pendant(g, v: int) -> tuple[KernelState, Pendant]:
    state = _as_state(g)
    if state.degree(v) != 1:
        raise ContractViolation(f"vertex {v} does not have degree 1")
    nb = tuple(sorted(state.adj[v]))
    state.remove([v, *nb])
    return state, Pendant(v, nb)


def apply_fold(g, v: int) -> tuple[KernelState, Fold]:
    state = _as_state(g)
    if not is_foldable(state, v):
        raise ContractViolation(f"vertex {v} is not a degree-2 vertex with non-adjacent neighbors")
    u, w = sorted(state.adj[v])
    outer = (state.adj[u] | state.adj[w]) - {u, v, w}
    state.remove([u, v, w])
    merged = state.add(outer)
    return state, Fold(u, v, w, merged)


def apply_unconfined(g, v: int) -> tuple[KernelState, Unconfined]:
    state = _as_state(g)
    if not is_unconfined(state, v):
        raise ContractViolation(f"vertex {v} is confined")
    state.remove([v])
    return state, Unconfined(v)


def apply_twin(g, u: int, v: int) -> tuple[KernelState, Twin]:
    state = _as_state(g)
    nb = state.adj[u]
    if u == v or len(nb) != 3 or state.adj[v] != nb:
        raise ContractViolation(f"{u} and {v} are not degree-3 twins")
    a, b, c = sorted(nb)
    has_edge = b in state.adj[a] or c in state.adj[a] or c in state.adj[b]
    if has_edge:
        state.remove([u, v, a, b, c])
        return state, Twin(u, v, (a, b, c), None)
    second = (state.adj[a] | state.adj[b] | state.adj[c]) - {u, v}
    state.remove([u, v, a, b, c])
    w = state.add(second)
    return state, Twin(u, v, (a, b, c), w)


def _next_event(state: KernelState) -> Optional[Event]:
    """Apply the first applicable rule (rule priority, then smallest vertex id)."""
    if state.with_degree(0):
        return apply_isolated(state, min(state.with_degree(0)))[1]
    if state.with_degree(1):
        return apply_pendant(state, min(state.with_degree(1)))[1]
    for v in sorted(state.with_degree(2)):
        if is_foldable(state, v):
            return apply_fold(state, v)[1]
    confined = state.confined
    for v in sorted(state.adj.keys() - confined):
        if is_unconfined(state, v):
            return apply_unconfined(state, v)[1]
        confined.add(v)
    for u in sorted(state.with_degree(3)):
        twin = find_twin(state, u)
        if twin is not None:
            return apply_twin(state, u, twin)[1]
    return None


def reduce(g: Graph) -> tuple[Graph, ReductionTrace]:
    """Apply the rules to a fixed point; alpha(g) == alpha(kernel) + trace.offset."""
    state = KernelState.from_graph(g)
    trace = ReductionTrace(g.n)
    while True:
        event = _next_event(state)
        if event is None and state.confined:
            # cached verdicts only cover nearby changes; confirm the fixed point afresh
            state.confined.clear()
            event = _next_event(state)
        if event is None:
            break
        trace.events.append(event)
    kernel, ids = state.graph()
    trace.kernel, trace.kernel_ids = kernel, ids
    return kernel, trace


def identity_trace(g: Graph) -> ReductionTrace:
    return ReductionTrace(g.n, [], g, list(range(g.n)))


def lift(trace: ReductionTrace, kernel_solution: Iterable[int]) -> list[int]:
    """Map an independent set of the kernel to one of the original graph."""
    kernel_solution = list(kernel_solution)
    if trace.kernel is not None and not is_independent_set(trace.kernel, kernel_solution):
        raise ContractViolation("kernel solution is not independent")
    sol = {trace.kernel_ids[i] for i in kernel_solution}
    for event in reversed(trace.events):
        if isinstance(event, (IsolatedInclude, Pendant)):
            sol.add(event.v)
        elif isinstance(event, Fold):
            if event.merged in sol:
                sol.discard(event.merged)
                sol.update((event.u, event.w))
            else:
                sol.add(event.v)
        elif isinstance(event, Twin):
            if event.gadget is not None and event.gadget in sol:
                sol.discard(event.gadget)
                sol.update(event.neighbors)
            else:
                sol.update((event.u, event.v))
    return sorted(sol)
