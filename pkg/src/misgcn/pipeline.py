"""Solve MIS, MVC, MC or SAT by way of MIS and report a verified answer."""

from __future__ import annotations

import dataclasses
import time
from typing import Optional

from .gcn import GcnModel
from .graph import Graph
from .instances import SolutionReport, UnverifiedSolution, verify_report
from .search import BestSolution, SearchConfig, basic_solve, classic_greedy, tree_search
from .transforms import complement_graph, mis_to_mvc, mis_to_sat_assignment, sat_to_mis

PROBLEMS = ("mis", "mvc", "mc", "sat")


def mis_instance(kind: str, instance) -> tuple[Graph, Optional[int]]:
    """The graph whose MIS answers ``instance``, and a size at which search may stop."""
    if kind == "mis" or kind == "mvc":
        return instance, None
    if kind == "mc":
        return complement_graph(instance), None
    if kind == "sat":
        mapping = sat_to_mis(instance)
        return mapping.graph, mapping.num_clauses
    raise ValueError(f"unknown problem kind {kind!r}")


def run_method(method: str, g: Graph, model: GcnModel, config: SearchConfig) -> BestSolution:
    """Run one of the benchmark method variants on an MIS instance."""
    cfg = dataclasses.replace
    if method == "classic":
        start = time.perf_counter()
        sol = classic_greedy(g)
        return BestSolution(sol, [], [len(sol)], 0, 1, time.perf_counter() - start)
    if method == "basic":
        return basic_solve(g, model, cfg(config, threads=1))
    if method == "basic+tree":
        return tree_search(g, model, cfg(config, threads=1, sampling=True))
    if method == "no-local-search":
        return tree_search(g, model, cfg(config, threads=1, local_search=False))
    if method == "no-reduction":
        return tree_search(g, model, cfg(config, threads=1, reduction=False, rekernelize=False))
    if method == "full":
        return tree_search(g, model, cfg(config, threads=1))
    if method == "full-parallel":
        return tree_search(g, model, cfg(config, threads=max(config.threads, 2)))
    raise ValueError(f"unknown method {method!r}")


METHODS = ("classic", "basic", "basic+tree", "no-local-search", "no-reduction", "full", "full-parallel")


def solve_problem(kind: str, instance, model: GcnModel, config: SearchConfig,
                  instance_id: str = "", method: str = "full") -> SolutionReport:
    start = time.perf_counter()
    g, target = mis_instance(kind, instance)
    if target is not None and config.target is None:
        config = dataclasses.replace(config, target=target)
    if method == "full" and config.threads > 1:
        method = "full-parallel"
    best = run_method(method, g, model, config)
    mis = best.vertices
    report = SolutionReport(
        problem=kind, instance=instance_id, objective=len(mis), vertices=mis,
        seed=config.seed,
        config={"method": method, **{k: v for k, v in dataclasses.asdict(config).items()}},
    )
    if kind == "mvc":
        cover = mis_to_mvc(g, mis)
        report.vertices, report.objective = cover, len(cover)
    elif kind == "sat":
        assignment = mis_to_sat_assignment(sat_to_mis(instance), mis)
        report.solved = assignment is not None
        if assignment is not None:
            report.assignment = [v if val else -v for v, val in sorted(assignment.items())]
    report.wall_time = time.perf_counter() - start
    if not verify_report(report, instance):
        raise UnverifiedSolution(f"{kind} answer for {instance_id!r} failed verification")
    return report
