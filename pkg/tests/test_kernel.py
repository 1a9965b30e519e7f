import pytest

from misgcn.graph import (
    ContractViolation, build_graph, complete_graph, cycle_graph, is_independent_set, path_graph, petersen_graph,
    star_graph,
)
from misgcn.kernel import (
    Fold, IsolatedInclude, Pendant, Twin, Unconfined, apply_fold, apply_pendant, apply_twin, apply_unconfined,
    KernelState, ReductionTrace, identity_trace, is_unconfined, lift, reduce,
)
from misgcn.oracle import brute_force_mis, exact_mis

from conftest import random_graphs

# u=0, v=1 share N = {a=2, b=3, c=4}; edge (a, b)
TWIN_WITH_EDGE = build_graph([(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3)], 5)


def test_p2_pendant():
    kernel, trace = reduce(path_graph(2))
    assert kernel.n == 0 and trace.offset == 1
    assert trace.events == [Pendant(0, (1,))]
    assert lift(trace, []) == [0]


def test_p3_fold_then_isolated():
    kernel, trace = reduce(path_graph(3))
    assert kernel.n == 0 and trace.offset == 2
    assert type(trace.events[-1]) is IsolatedInclude
    assert sorted(lift(trace, [])) == [0, 2]


def test_fold_on_p3_by_hand():
    state, event = apply_fold(path_graph(3), 1)
    assert isinstance(event, Fold) and (event.u, event.v, event.w) == (0, 1, 2)
    assert list(state.adj) == [event.merged] and not state.adj[event.merged]


def test_fold_rejects_triangle_vertex():
    with pytest.raises(ContractViolation):
        apply_fold(complete_graph(3), 0)


def test_twin_gadget_with_edge():
    assert brute_force_mis(TWIN_WITH_EDGE)[0] == 2
    state, event = apply_twin(TWIN_WITH_EDGE, 0, 1)
    assert event == Twin(0, 1, (2, 3, 4), None)
    assert not state.adj
    kernel, trace = reduce(TWIN_WITH_EDGE)
    assert kernel.n == 0 and trace.offset == 2
    s = lift(trace, [])
    assert len(s) == 2 and is_independent_set(TWIN_WITH_EDGE, s)


def test_twin_gadget_edgeless_neighborhood():
    # u, v with N = {2, 3, 4} independent; each of 2, 3, 4 has an outside neighbor
    edges = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7)]
    g = build_graph(edges, 8)
    state, event = apply_twin(g, 0, 1)
    assert event.gadget == 8
    assert state.adj[8] == {5, 6, 7}
    kernel, ids = state.graph()
    trace = ReductionTrace(g.n, [event], kernel, ids)
    with_w = lift(trace, [ids.index(8)])
    assert {2, 3, 4} <= set(with_w)
    without = lift(trace, [ids.index(5)])
    assert {0, 1} <= set(without)
    assert is_independent_set(g, with_w) and is_independent_set(g, without)


def test_twin_rejects_non_twins():
    with pytest.raises(ContractViolation):
        apply_twin(cycle_graph(6), 0, 2)


def test_star_pendant():
    state, event = apply_pendant(star_graph(3), 1)
    assert event == Pendant(1, (0,))
    assert sorted(state.adj) == [2, 3]
    kernel, trace = reduce(star_graph(3))
    assert kernel.n == 0 and trace.offset == 3


def test_pendant_rejects():
    with pytest.raises(ContractViolation):
        apply_pendant(path_graph(3), 1)


def test_unconfined_on_p2():
    assert is_unconfined_graph(path_graph(2), 0)
    state, event = apply_unconfined(path_graph(2), 0)
    assert event == Unconfined(0)
    assert list(state.adj) == [1]


def is_unconfined_graph(g, v):
    return is_unconfined(KernelState.from_graph(g), v)


def test_unconfined_rejects_confined():
    # a claw leaf belongs to every maximum independent set
    with pytest.raises(ContractViolation):
        apply_unconfined(star_graph(3), 1)


def test_unconfined_cycle_vertex():
    # S grows {0} -> {0, 2}; then neighbor 4 has nothing outside N[S]
    assert is_unconfined_graph(cycle_graph(5), 0)


def test_unconfined_claw_center():
    # the center of K1,3 is dominated by any leaf
    assert is_unconfined_graph(star_graph(3), 0)
    assert not is_unconfined_graph(star_graph(3), 1)


def test_c4_resolves_to_two():
    kernel, trace = reduce(cycle_graph(4))
    assert kernel.n == 0 and trace.offset == 2
    s = lift(trace, [])
    assert len(s) == 2 and is_independent_set(cycle_graph(4), s)


def test_identity_lift():
    g = cycle_graph(5)
    trace = identity_trace(g)
    assert lift(trace, [0, 2]) == [0, 2]


def test_lift_rejects_dependent_kernel_solution():
    kernel, trace = reduce(petersen_graph())
    assert kernel.n == 10
    assert kernel.has_edge(0, 1)
    with pytest.raises(ContractViolation):
        lift(trace, [0, 1])


def test_soundness_random():
    for g in random_graphs(500, (1, 18), (0.1, 0.2, 0.3, 0.4, 0.5), seed=21):
        kernel, trace = reduce(g)
        assert kernel.n <= g.n
        result = exact_mis(kernel)
        s = lift(trace, result.witness)
        assert is_independent_set(g, s)
        assert len(s) == result.alpha + trace.offset == exact_mis(g).alpha


def test_kernel_is_fixed_point():
    for g in random_graphs(200, (5, 30), (0.1, 0.2, 0.3), seed=22):
        kernel, _ = reduce(g)
        again, trace = reduce(kernel)
        assert trace.events == [] and again == kernel


def test_deterministic():
    for g in random_graphs(50, (5, 25), (0.15, 0.3), seed=23):
        a, ta = reduce(g)
        b, tb = reduce(g)
        assert a == b and ta.events == tb.events and ta.kernel_ids == tb.kernel_ids
