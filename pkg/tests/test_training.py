import itertools
import math

import numpy as np
import pytest

from misgcn.gcn import forward, init_model, zero_model
from misgcn.graph import ContractViolation, build_graph, cycle_graph, erdos_renyi, is_independent_set, permute_graph
from misgcn.instances import CnfFormula
from misgcn.oracle import exact_mis
from misgcn.training import (
    Adam, Sample, TrainConfig, backward, bce_loss, hindsight_loss, map_losses, mean_hindsight_loss,
    synthesize_labels, train,
)
from misgcn.generate import planted_ksat
from misgcn.transforms import sat_to_mis

from conftest import gradient_check


def test_bce_examples():
    label = np.array([1.0, 0.0, 1.0])
    assert bce_loss(label, label) < 1e-10
    assert math.isclose(bce_loss(np.full(5, 0.5), np.array([0, 1, 0, 1, 1.0])), 5 * math.log(2))
    big = bce_loss(np.array([1.0]), np.array([0.0]))
    assert math.isfinite(big) and big > 20


def test_bce_shape_mismatch():
    with pytest.raises(ValueError):
        bce_loss(np.zeros(3), np.zeros(4))


def test_hindsight_examples():
    # one vertex, label 1: map losses are -ln p
    maps = np.array([[math.exp(-3.0), math.exp(-1.2)]])
    loss, idx = hindsight_loss(maps, np.array([1.0]))
    assert idx == 1 and math.isclose(loss, 1.2)
    single = np.array([[0.3], [0.8]])
    label = np.array([0.0, 1.0])
    assert hindsight_loss(single, label)[0] == pytest.approx(bce_loss(single[:, 0], label))
    same = np.repeat(single, 4, axis=1)
    assert hindsight_loss(same, label) == (pytest.approx(bce_loss(single[:, 0], label)), 0)


def test_hindsight_is_minimum():
    rng = np.random.default_rng(0)
    for _ in range(50):
        maps = rng.uniform(size=(7, 5))
        label = (rng.uniform(size=7) < 0.4).astype(float)
        loss, _ = hindsight_loss(maps, label)
        assert all(loss <= bce_loss(maps[:, m], label) + 1e-12 for m in range(5))
        assert np.allclose(map_losses(maps, label), [bce_loss(maps[:, m], label) for m in range(5)])


def test_zero_model_gradient_nonzero_and_finite():
    # one layer: deeper zero models feed ReLU(0) = 0 into the last layer
    model = zero_model([3, 2])
    g = cycle_graph(5)
    _, best, g0, g1 = backward(model, g, np.zeros(5))
    assert all(np.all(np.isfinite(x)) for x in g0 + g1)
    assert np.any(g0[-1] != 0) and np.any(g1[-1] != 0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    for i in range(5):
        g = erdos_renyi(8, 0.35, rng)
        label = np.zeros(8)
        label[exact_mis(g).witness] = 1.0
        assert gradient_check(init_model(3, [4, 4, 4, 2], seed=i), g, label) <= 1e-4


def test_non_argmin_columns_get_no_gradient():
    rng = np.random.default_rng(12)
    g = erdos_renyi(9, 0.3, rng)
    model = init_model(3, [4, 4, 4, 3], seed=1)
    label = np.zeros(9)
    label[exact_mis(g).witness] = 1.0
    _, best, g0, g1 = backward(model, g, label)
    for m in range(3):
        if m != best:
            assert np.all(g0[-1][:, m] == 0) and np.all(g1[-1][:, m] == 0)
    assert np.any(g0[-1][:, best] != 0)


def test_adam_first_step_moves_by_lr():
    p = [np.array([1.0, -2.0])]
    Adam(p, lr=0.1).step(p, [np.array([3.0, -0.5])])
    assert np.allclose(p[0], [0.9, -1.9], atol=1e-6)


def _tiny_samples(count=10, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        g = erdos_renyi(int(rng.integers(6, 12)), 0.3, rng)
        label = np.zeros(g.n)
        label[exact_mis(g).witness] = 1.0
        out.append(Sample(g, [label], f"g{i}"))
    return out


def test_train_zero_epochs_returns_initial_model():
    config = TrainConfig(epochs=0, maps=2, layers=3, width=4, seed=9)
    result = train(_tiny_samples(3), config)
    assert result.model == init_model(3, [4, 4, 4, 2], seed=9)
    assert result.history == []


def test_train_reduces_loss():
    samples = _tiny_samples(10)
    config = TrainConfig(epochs=50, lr=1e-2, maps=2, layers=3, width=8, seed=0)
    start = init_model(3, [8, 8, 8, 2], seed=0)
    result = train(samples, config)
    assert mean_hindsight_loss(result.model, samples) < mean_hindsight_loss(start, samples)


def test_train_deterministic():
    samples = _tiny_samples(4)
    config = TrainConfig(epochs=3, lr=1e-3, maps=2, layers=2, width=4, seed=3)
    a, b = train(samples, config), train(samples, config)
    assert a.model == b.model and a.history == b.history


def test_train_rejects_empty():
    with pytest.raises(ValueError):
        train([], TrainConfig())


def test_sample_rejects_dependent_label():
    with pytest.raises(ContractViolation):
        Sample(cycle_graph(4), [np.array([1.0, 1.0, 0.0, 0.0])])


# C4-like: exactly two maximum independent sets, {0,2,3} and {4,5,6}, and no
# two vertices alike under colour refinement. (C4 itself is vertex-transitive,
# so every map of an equivariant network is constant on it.)
TWO_MODES = build_graph([(0, 1), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 6), (2, 4), (2, 6),
                         (3, 4), (3, 5), (3, 6)], 7)


def _two_mode_family():
    """Relabelled copies of TWO_MODES, labelled alternately with its two optima."""
    rng = np.random.default_rng(5)
    samples = []
    for i in range(8):
        perm = rng.permutation(7)
        label = np.zeros(7)
        label[perm[[0, 2, 3] if i % 2 == 0 else [4, 5, 6]]] = 1.0
        samples.append(Sample(permute_graph(TWO_MODES, perm), [label]))
    return samples


def test_two_mode_family_has_two_optima():
    sets = [s for s in itertools.combinations(range(7), 3) if is_independent_set(TWO_MODES, s)]
    assert sets == [(0, 2, 3), (4, 5, 6)]
    assert exact_mis(TWO_MODES).alpha == 3


def test_two_maps_beat_one_on_two_mode_family():
    samples = _two_mode_family()
    results = {}
    for maps in (1, 2):
        config = TrainConfig(epochs=300, lr=1e-2, maps=maps, layers=4, width=16, seed=0)
        results[maps] = mean_hindsight_loss(train(samples, config).model, samples)
    # one map sees each of the six disputed vertices labelled 1 half the time: 6 ln 2 at best
    split = 6 * math.log(2)
    assert results[1] >= split - 1e-6
    assert results[2] < split - 1.0


WORKED = CnfFormula(3, ((1, 2, -3), (-1, 2)))


def test_synthesize_two_choices():
    f = CnfFormula(2, ((1, 2), (2,)))
    labels = synthesize_labels(f, {1: True, 2: True}, k=8)
    assert len(labels) == 2
    assert len({tuple(l) for l in labels}) == 2
    g = sat_to_mis(f).graph
    for lab in labels:
        assert is_independent_set(g, np.flatnonzero(lab)) and lab.sum() == 2


def test_synthesize_no_freedom():
    f = CnfFormula(2, ((1, 2), (-1,)))
    assert len(synthesize_labels(f, {1: False, 2: True}, k=8)) == 1


def test_synthesize_single_is_seeded():
    f, assignment = planted_ksat(20, 91, np.random.default_rng(0))
    a = synthesize_labels(f, assignment, k=1, seed=4)
    b = synthesize_labels(f, assignment, k=1, seed=4)
    assert len(a) == 1 and np.array_equal(a[0], b[0])


def test_synthesize_rejects_unsatisfying():
    with pytest.raises(ContractViolation):
        synthesize_labels(WORKED, {1: True, 2: False, 3: True})


def test_synthesized_labels_are_maximum():
    rng = np.random.default_rng(1)
    for i in range(20):
        f, assignment = planted_ksat(10, 30, rng)
        g = sat_to_mis(f).graph
        labels = synthesize_labels(f, assignment, k=8, seed=i)
        assert len({tuple(l) for l in labels}) == len(labels)
        for lab in labels:
            assert lab.sum() == 30 and is_independent_set(g, np.flatnonzero(lab))
