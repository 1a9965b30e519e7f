"""Multi-output graph convolutional network: all-ones input, bias-free layers, sigmoid head."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import Graph, normalized_adjacency, permute_graph


@dataclass
class GcnModel:
    """Per layer l: theta0[l] and theta1[l], each widths[l] x widths[l+1]."""

    widths: list[int]
    theta0: list[np.ndarray]
    theta1: list[np.ndarray]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.widths = [int(w) for w in self.widths]
        if len(self.widths) < 2:
            raise ValueError("a model needs at least one layer")
        if len(self.theta0) != self.num_layers or len(self.theta1) != self.num_layers:
            raise ValueError(f"expected {self.num_layers} weight pairs")
        for l, (a, b) in enumerate(zip(self.theta0, self.theta1)):
            shape = (self.widths[l], self.widths[l + 1])
            if a.shape != shape or b.shape != shape:
                raise ValueError(f"layer {l}: weights {a.shape}/{b.shape}, expected {shape}")

    @property
    def num_layers(self) -> int:
        return len(self.widths) - 1

    @property
    def num_maps(self) -> int:
        return self.widths[-1]

    def params(self) -> list[np.ndarray]:
        return [w for pair in zip(self.theta0, self.theta1) for w in pair]

    def copy(self) -> "GcnModel":
        return GcnModel(list(self.widths), [w.copy() for w in self.theta0],
                        [w.copy() for w in self.theta1], dict(self.meta))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GcnModel):
            return NotImplemented
        return self.widths == other.widths and all(
            np.array_equal(a, b) for a, b in zip(self.params(), other.params()))


def default_widths(layers: int = 20, width: int = 32, maps: int = 32, input_width: Optional[int] = None) -> list[int]:
    return [input_width or width] + [width] * (layers - 1) + [maps]


def init_model(layers: int, widths: Sequence[int], seed: int = 0) -> GcnModel:
    """Glorot-uniform weights, deterministic in ``seed``."""
    widths = list(widths)
    if layers < 1 or len(widths) != layers + 1:
        raise ValueError(f"{layers} layers need {layers + 1} widths, got {len(widths)}")
    if any(w < 1 for w in widths):
        raise ValueError("layer widths must be positive")
    rng = np.random.default_rng(seed)
    theta0, theta1 = [], []
    for c_in, c_out in zip(widths[:-1], widths[1:]):
        limit = np.sqrt(6.0 / (c_in + c_out))
        theta0.append(rng.uniform(-limit, limit, size=(c_in, c_out)))
        theta1.append(rng.uniform(-limit, limit, size=(c_in, c_out)))
    return GcnModel(widths, theta0, theta1)


def zero_model(widths: Sequence[int]) -> GcnModel:
    widths = list(widths)
    shapes = list(zip(widths[:-1], widths[1:]))
    return GcnModel(widths, [np.zeros(s) for s in shapes], [np.zeros(s) for s in shapes])


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    adj: sp.csr_matrix
    inputs: list[np.ndarray]       # H^l fed into layer l
    propagated: list[np.ndarray]   # A_hat H^l
    pre: list[np.ndarray]          # H^l theta0 + A_hat H^l theta1
    output: np.ndarray


def forward_cached(model: GcnModel, g: Graph, adj: Optional[sp.csr_matrix] = None) -> ForwardCache:
    if adj is None:
        adj = normalized_adjacency(g)
    h = np.ones((g.n, model.widths[0]))
    inputs, propagated, pre = [], [], []
    for l in range(model.num_layers):
        ah = adj @ h
        z = h @ model.theta0[l] + ah @ model.theta1[l]
        inputs.append(h)
        propagated.append(ah)
        pre.append(z)
        h = np.maximum(z, 0.0) if l < model.num_layers - 1 else z
    return ForwardCache(adj, inputs, propagated, pre, sigmoid(h))


def forward(model: GcnModel, g: Graph) -> np.ndarray:
    """N x M probability maps."""
    return forward_cached(model, g).output


def permute_check(model: GcnModel, g: Graph, perm: Sequence[int], tol: float = 1e-9,
                  outputs: Optional[tuple[np.ndarray, np.ndarray]] = None) -> bool:
    """True iff relabelling the graph by ``perm`` relabels the output rows the same way.

    ``outputs`` overrides the two forward results (for exercising the detector).
    """
    perm = np.asarray(perm)
    if outputs is None:
        outputs = forward(model, g), forward(model, permute_graph(g, perm))
    base, moved = outputs
    return bool(np.allclose(moved[perm], base, rtol=0.0, atol=tol))
