"""Graph-convolution guided tree search for MIS, MVC, MC and SAT."""

from .gcn import GcnModel, forward, init_model
from .graph import Graph, build_graph, is_independent_set
from .kernel import lift, reduce
from .local_search import two_improve
from .oracle import dpll_sat, exact_mis
from .pipeline import solve_problem
from .search import SearchConfig, basic_solve, tree_search

__all__ = [
    "GcnModel", "Graph", "SearchConfig", "basic_solve", "build_graph", "dpll_sat", "exact_mis",
    "forward", "init_model", "is_independent_set", "lift", "reduce", "solve_problem",
    "tree_search", "two_improve",
]
