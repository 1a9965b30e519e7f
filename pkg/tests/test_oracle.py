import numpy as np
import pytest

from misgcn.generate import random_ksat
from misgcn.graph import (
    build_graph, complete_graph, cycle_graph, is_independent_set, path_graph, petersen_graph, star_graph,
)
from misgcn.instances import CnfFormula
from misgcn.oracle import brute_force_mis, dpll_sat, exact_mis
from misgcn.transforms import sat_to_mis

from conftest import random_graphs


@pytest.mark.parametrize("g, alpha", [
    (cycle_graph(4), 2), (cycle_graph(5), 2), (path_graph(5), 3), (star_graph(3), 3), (complete_graph(4), 1),
])
def test_small_alphas_against_enumeration(g, alpha):
    assert brute_force_mis(g)[0] == alpha
    res = exact_mis(g)
    assert res.alpha == alpha
    assert is_independent_set(g, res.witness) and len(res.witness) == alpha


def test_petersen():
    g = petersen_graph()
    assert brute_force_mis(g)[0] == 4
    assert exact_mis(g).alpha == 4


def test_empty_graph():
    assert exact_mis(build_graph([], 7)).alpha == 7
    assert exact_mis(build_graph([], 0)).alpha == 0


def test_agrees_with_enumeration_up_to_16():
    for g in random_graphs(150, (1, 16), seed=7):
        res = exact_mis(g)
        assert res.alpha == brute_force_mis(g)[0]
        assert is_independent_set(g, res.witness) and len(res.witness) == res.alpha


def test_budget_exhaustion_is_unknown_not_wrong():
    g = next(random_graphs(1, (40, 40), ps=(0.2,), seed=3))
    res = exact_mis(g, limit=5)
    assert res.alpha is None and not res.known


def test_dpll_examples():
    assert dpll_sat(CnfFormula(1, ((1,), (-1,)))) is None
    a = dpll_sat(CnfFormula(2, ((1, 2), (-1, 2))))
    assert a is not None and a[2] is True


def test_dpll_agrees_with_sat_graph_alpha():
    rng = np.random.default_rng(11)
    for _ in range(60):
        f = random_ksat(10, int(rng.integers(30, 60)), rng)
        sat = dpll_sat(f)
        if sat is not None:
            assert f.satisfied_by(sat)
        m = sat_to_mis(f)
        assert (sat is not None) == (exact_mis(m.graph).alpha == m.num_clauses)
