"""Supervised training: clamped BCE, hindsight minimum over maps, manual backprop, Adam."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gcn import GcnModel, default_widths, forward_cached, init_model
from .graph import ContractViolation, Graph, is_independent_set
from .instances import CnfFormula
from .transforms import sat_to_mis

log = logging.getLogger(__name__)

EPS = 1e-12


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class Sample:
    graph: Graph
    labels: list[np.ndarray]
    name: str = ""

    def __post_init__(self):
        for lab in self.labels:
            if lab.shape != (self.graph.n,):
                raise ValueError("label length does not match the graph")
            if not is_independent_set(self.graph, np.flatnonzero(lab)):
                raise ContractViolation(f"label of sample {self.name!r} is not an independent set")


@dataclass
class TrainConfig:
    epochs: int = 200
    lr: float = 1e-4
    seed: int = 0
    maps: int = 32
    layers: int = 20
    width: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def bce_loss(prediction: np.ndarray, label: np.ndarray) -> float:
    """Non-negative binary cross-entropy summed over vertices; predictions clamped to [1e-12, 1-1e-12]."""
    prediction = np.asarray(prediction, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    if prediction.shape != label.shape:
        raise ValueError(f"prediction shape {prediction.shape} != label shape {label.shape}")
    p = np.clip(prediction, EPS, 1.0 - EPS)
    return float(-np.sum(label * np.log(p) + (1.0 - label) * np.log1p(-p)))


def map_losses(maps: np.ndarray, label: np.ndarray) -> np.ndarray:
    p = np.clip(maps, EPS, 1.0 - EPS)
    lab = np.asarray(label, dtype=np.float64)[:, None]
    return -np.sum(lab * np.log(p) + (1.0 - lab) * np.log1p(-p), axis=0)


def hindsight_loss(maps: np.ndarray, label: np.ndarray) -> tuple[float, int]:
    """Smallest per-map BCE and the index of the map attaining it (first on ties)."""
    losses = map_losses(maps, label)
    best = int(np.argmin(losses))
    return float(losses[best]), best


def backward(model: GcnModel, g: Graph, label: np.ndarray, cache=None
             ) -> tuple[float, int, list[np.ndarray], list[np.ndarray]]:
    """Hindsight loss, argmin map, and its gradients w.r.t. theta0 and theta1 of every layer."""
    if cache is None:
        cache = forward_cached(model, g)
    out = cache.output
    loss, best = hindsight_loss(out, label)
    p = out[:, best]
    inside = (p > EPS) & (p < 1.0 - EPS)
    dz = np.zeros_like(out)
    # d BCE / d logit = p - l wherever the clamp is inactive
    dz[:, best] = np.where(inside, p - label, 0.0)
    g0 = [None] * model.num_layers
    g1 = [None] * model.num_layers
    for l in range(model.num_layers - 1, -1, -1):
        g0[l] = cache.inputs[l].T @ dz
        g1[l] = cache.propagated[l].T @ dz
        if l == 0:
            break
        dh = dz @ model.theta0[l].T + cache.adj.T @ (dz @ model.theta1[l].T)
        dz = dh * (cache.pre[l - 1] > 0)
    return loss, best, g0, g1


class Adam:
    def __init__(self, params: Sequence[np.ndarray], lr=1e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        self.step_count += 1
        t = self.step_count
        b1, b2 = self.beta1, self.beta2
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            m_hat = m / (1 - b1 ** t)
            v_hat = v / (1 - b2 ** t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def mean_hindsight_loss(model: GcnModel, samples: Sequence[Sample]) -> float:
    """Mean over samples of the hindsight loss against each sample's first label."""
    total = 0.0
    for s in samples:
        total += hindsight_loss(forward_cached(model, s.graph).output, s.labels[0])[0]
    return total / max(len(samples), 1)


@dataclass
class TrainResult:
    model: GcnModel
    history: list[float] = field(default_factory=list)


def train(samples: Sequence[Sample], config: TrainConfig, model: Optional[GcnModel] = None,
          progress=None) -> TrainResult:
    """Adam over shuffled single-graph steps; one label drawn per sample per epoch."""
    if not samples:
        raise ValueError("empty training set")
    if model is None:
        widths = default_widths(config.layers, config.width, config.maps)
        model = init_model(config.layers, widths, config.seed)
    model = model.copy()
    model.meta.update({"adam": f"{config.beta1} {config.beta2} {config.eps}", "lr": repr(config.lr)})
    params = model.params()
    opt = Adam(params, config.lr, config.beta1, config.beta2, config.eps)
    rng = np.random.default_rng([config.seed, 1])
    history = []
    for epoch in range(config.epochs):
        total = 0.0
        for i in rng.permutation(len(samples)):
            s = samples[i]
            label = s.labels[int(rng.integers(len(s.labels)))]
            loss, _, g0, g1 = backward(model, s.graph, label)
            if not math.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in g0 + g1):
                raise TrainingDiverged(f"non-finite loss or gradient in epoch {epoch}")
            opt.step(params, [g for pair in zip(g0, g1) for g in pair])
            total += loss
        history.append(total / len(samples))
        log.info("epoch %d mean hindsight loss %.4f", epoch, history[-1])
        if progress is not None:
            progress(epoch, history[-1])
    return TrainResult(model, history)


def synthesize_labels(f: CnfFormula, assignment: dict[int, bool], k: int = 8, seed: int = 0
                      ) -> list[np.ndarray]:
    """Up to ``k`` distinct MIS labels of the SAT graph, one true literal picked per clause."""
    if not f.satisfied_by(assignment):
        raise ContractViolation("assignment does not satisfy the formula")
    choices = []
    offset = 0
    for clause in f.clauses:
        true_pos = [offset + i for i, lit in enumerate(clause) if assignment.get(abs(lit), False) == (lit > 0)]
        choices.append(true_pos)
        offset += len(clause)
    n = offset
    total = math.prod(len(c) for c in choices)
    rng = np.random.default_rng(seed)
    picks: list[tuple[int, ...]] = []
    if total <= k:
        picks = list(itertools.product(*choices))
    else:
        seen = set()
        while len(picks) < k:
            pick = tuple(c[int(rng.integers(len(c)))] for c in choices)
            if pick not in seen:
                seen.add(pick)
                picks.append(pick)
    labels = []
    for pick in picks:
        lab = np.zeros(n)
        lab[list(pick)] = 1.0
        labels.append(lab)
    return labels


def sat_sample(f: CnfFormula, assignment: dict[int, bool], k: int = 8, seed: int = 0, name: str = "") -> Sample:
    return Sample(sat_to_mis(f).graph, synthesize_labels(f, assignment, k, seed), name)
