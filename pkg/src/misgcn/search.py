"""Network-guided greedy labelling, diversified tree search and its threaded variant."""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gcn import GcnModel, forward
from .graph import Graph, induced_subgraph, is_independent_set
from .kernel import ReductionTrace, identity_trace, lift, reduce
from .local_search import two_improve


@dataclass
class SearchConfig:
    time_limit: float = 10.0
    threads: int = 1
    maps: Optional[int] = None          # None: every map the model emits
    queue_capacity: int = 1_000_000
    reduction: bool = True              # kernelize the input graph
    rekernelize: bool = True            # also kernelize every residual graph
    local_search: bool = True
    seed: int = 0
    target: Optional[int] = None        # stop once a solution this large is found
    max_expansions: Optional[int] = None
    sampling: bool = False              # children from Gumbel-perturbed copies of map 0

    def __post_init__(self):
        if self.time_limit < 0:
            raise ValueError("time limit must be non-negative")
        if self.threads < 1:
            raise ValueError("need at least one thread")


@dataclass(frozen=True)
class Link:
    """One level of the labelling chain of a search node.

    ``trace`` reduced this level's input graph to the kernel that was labelled;
    ``chosen`` are the parent kernel's vertices labelled ONE on the way here and
    ``residual_map`` sends this level's input graph indices to the parent kernel.
    """

    trace: ReductionTrace
    parent: Optional["Link"] = None
    chosen: tuple[int, ...] = ()
    residual_map: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SearchNode:
    graph: Graph            # unlabelled remainder, already kernelized
    link: Link
    depth: int = 0

    @property
    def complete(self) -> bool:
        return self.graph.n == 0


def lift_chain(link: Link, kernel_solution=()) -> list[int]:
    """Bring an independent set of the deepest kernel back to the original graph."""
    sol = list(kernel_solution)
    while True:
        sol = lift(link.trace, sol)
        if link.parent is None:
            return sol
        sol = list(link.chosen) + link.residual_map[sol].tolist()
        link = link.parent


def _kernelize(g: Graph, enabled: bool) -> tuple[Graph, ReductionTrace]:
    return reduce(g) if enabled else (g, identity_trace(g))


def root_node(g: Graph, config: SearchConfig) -> SearchNode:
    kernel, trace = _kernelize(g, config.reduction)
    return SearchNode(kernel, Link(trace))


def greedy_label_pass(node: SearchNode, scores: np.ndarray, rekernelize: bool = True) -> SearchNode:
    """Label vertices ONE in descending score order, their neighbors ZERO, until
    the next vertex in the order is already labelled; then drop labelled vertices."""
    g = node.graph
    if g.n == 0:
        raise ValueError("nothing left to label")
    order = np.argsort(-np.asarray(scores), kind="stable")
    free = [True] * g.n
    adj = g.adj
    chosen = []
    for v in order.tolist():
        if not free[v]:
            break
        free[v] = False
        for u in adj[v]:
            free[u] = False
        chosen.append(v)
    residual, mapping = induced_subgraph(g, np.flatnonzero(free))
    kernel, trace = _kernelize(residual, rekernelize)
    residual_map = np.fromiter(mapping, dtype=np.int64, count=len(mapping))
    return SearchNode(kernel, Link(trace, node.link, tuple(chosen), residual_map), node.depth + 1)


@dataclass
class BestSolution:
    vertices: list[int] = field(default_factory=list)
    log: list[tuple[float, int]] = field(default_factory=list)   # (seconds, size) at each improvement
    trail: list[int] = field(default_factory=list)               # size of every complete labelling, in order
    expansions: int = 0
    solutions: int = 0
    seconds: float = 0.0

    @property
    def size(self) -> int:
        return len(self.vertices)


class _Shared:
    """State shared by workers: node queue, best-solution cell, clock."""

    def __init__(self, g: Graph, config: SearchConfig, root: SearchNode, start: float):
        self.g = g
        self.config = config
        self.root = root
        self.start = start
        self.lock = threading.Lock()
        self.queue: list[tuple[int, SearchNode]] = [(0, root)]
        self.counter = itertools.count(1)
        self.best = BestSolution(lift_chain(root.link))
        self.best.log.append((0.0, self.best.size))
        self.expansions_claimed = 0
        self.done = False

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def should_stop(self) -> bool:
        cfg = self.config
        if self.done or self.elapsed() >= cfg.time_limit:
            return True
        return cfg.target is not None and self.best.size >= cfg.target

    def pop(self, rng: np.random.Generator) -> Optional[SearchNode]:
        with self.lock:
            cfg = self.config
            if cfg.max_expansions is not None and self.expansions_claimed >= cfg.max_expansions:
                self.done = True
                return None
            self.expansions_claimed += 1
            if not self.queue:
                self.queue.append((next(self.counter), self.root))
            i = int(rng.integers(len(self.queue)))
            self.queue[i], self.queue[-1] = self.queue[-1], self.queue[i]
            return self.queue.pop()[1]

    def push(self, node: SearchNode) -> None:
        with self.lock:
            self.queue.append((next(self.counter), node))
            if len(self.queue) > self.config.queue_capacity:
                oldest = min(range(len(self.queue)), key=lambda i: self.queue[i][0])
                self.queue.pop(oldest)

    def offer(self, vertices: list[int]) -> None:
        if not is_independent_set(self.g, vertices):
            raise AssertionError("search produced a dependent set")
        with self.lock:
            best = self.best
            best.solutions += 1
            best.trail.append(len(vertices))
            if len(vertices) > best.size:
                best.vertices = vertices
                best.log.append((self.elapsed(), len(vertices)))


def _finish(shared: _Shared, node: SearchNode) -> None:
    sol = lift_chain(node.link)
    if shared.config.local_search:
        sol = two_improve(shared.g, sol)
    shared.offer(sol)


def _child_scores(maps: np.ndarray, config: SearchConfig, rng: np.random.Generator) -> list[np.ndarray]:
    count = maps.shape[1] if config.maps is None else min(config.maps, maps.shape[1])
    if not config.sampling:
        return [maps[:, m] for m in range(count)]
    p = np.clip(maps[:, 0], 1e-12, 1 - 1e-12)
    logits = np.log(p) - np.log1p(-p)
    return [logits + rng.gumbel(size=p.shape) for _ in range(max(count, 1))]


def _expand(shared: _Shared, model: GcnModel, rng: np.random.Generator) -> bool:
    node = shared.pop(rng)
    if node is None:
        return False
    if node.complete:
        _finish(shared, node)
        return True
    maps = forward(model, node.graph)
    for scores in _child_scores(maps, shared.config, rng):
        child = greedy_label_pass(node, scores, shared.config.rekernelize)
        if child.complete:
            _finish(shared, child)
        else:
            shared.push(child)
        if shared.should_stop():
            break
    with shared.lock:
        shared.best.expansions += 1
    return True


def _worker(shared: _Shared, model: GcnModel, worker_id: int, errors: list) -> None:
    rng = np.random.default_rng([shared.config.seed, worker_id])
    try:
        while not shared.should_stop():
            if not _expand(shared, model, rng):
                break
    except BaseException as exc:  # surfaced by the caller
        errors.append(exc)
        shared.done = True


def tree_search(g: Graph, model: GcnModel, config: SearchConfig) -> BestSolution:
    """Random-pop queue search; each expansion spawns one child per probability map.

    Runs ``config.threads`` workers sharing the queue and best solution.
    """
    start = time.perf_counter()
    root = root_node(g, config)
    shared = _Shared(g, config, root, start)
    if root.complete:
        # the kernel vanished: the lifted set is already maximum
        shared.best.seconds = shared.elapsed()
        return shared.best
    errors: list[BaseException] = []
    if config.threads == 1:
        _worker(shared, model, 0, errors)
    else:
        workers = [threading.Thread(target=_worker, args=(shared, model, t, errors), daemon=True)
                   for t in range(config.threads)]
        for w in workers:
            w.start()
        for w in workers:
            w.join()
    if errors:
        raise errors[0]
    shared.best.seconds = shared.elapsed()
    return shared.best


parallel_tree_search = tree_search


def basic_solve(g: Graph, model: GcnModel, config: Optional[SearchConfig] = None) -> BestSolution:
    """Single greedy descent using map 0 at every level, then lift and local search."""
    config = config or SearchConfig()
    start = time.perf_counter()
    node = root_node(g, config)
    while not node.complete:
        node = greedy_label_pass(node, forward(model, node.graph)[:, 0], config.rekernelize)
    sol = lift_chain(node.link)
    if config.local_search:
        sol = two_improve(g, sol)
    elapsed = time.perf_counter() - start
    return BestSolution(sol, [(elapsed, len(sol))], [len(sol)], node.depth, 1, elapsed)


def classic_greedy(g: Graph) -> list[int]:
    """Repeatedly take a minimum-degree vertex (smallest id on ties) and drop its neighbors."""
    adj = {v: set(nb) for v, nb in enumerate(g.adj)}
    chosen = []
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        chosen.append(v)
        for u in [v, *adj[v]]:
            for w in adj.pop(u):
                if w in adj:
                    adj[w].discard(u)
    return sorted(chosen)
