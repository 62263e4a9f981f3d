"""From-scratch graph convolutional network for graph classification.

Three propagation layers (input D -> H, hidden H -> H, output H -> C) over
the symmetrically normalized adjacency with self-loops, ReLU after the first
two layers, global mean pooling, softmax. Trained with mini-batch Adam plus
coupled L2 weight decay on manually derived gradients. Everything is
deterministic for a fixed (seed, data, config).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .graphs import Dataset, Graph, normalized_adjacency, one_hot_features

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; defaults are the experiment settings."""

    hidden_width: int = 32
    learning_rate: float = 0.01
    weight_decay: float = 5e-4
    batch_size: int = 32
    max_epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        for name in ("hidden_width", "learning_rate", "weight_decay", "batch_size", "max_epochs"):
            if getattr(self, name) <= 0 and name != "weight_decay":
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")


@dataclass(frozen=True)
class ModelParams:
    """All trainable weights plus Adam state. Treat instances as immutable."""

    weights: tuple[np.ndarray, ...]   # W0 (D,H), W1 (H,H), W2 (H,C)
    adam_m: tuple[np.ndarray, ...]
    adam_v: tuple[np.ndarray, ...]
    step: int = 0

    def __post_init__(self):
        shapes = [w.shape for w in self.weights]
        if len(shapes) != 3 or shapes[0][1] != shapes[1][0] or shapes[1][1] != shapes[2][0]:
            raise ValueError(f"inconsistent layer shapes {shapes}")
        for group in (self.adam_m, self.adam_v):
            if tuple(a.shape for a in group) != tuple(shapes):
                raise ValueError("optimizer state does not shape-match the weights")
        for arr in (*self.weights, *self.adam_m, *self.adam_v):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite entries in model parameters")

    @property
    def feature_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return self.weights[2].shape[1]


@dataclass(frozen=True)
class ForwardCache:
    """Intermediate activations of one forward pass, for inspection and tests."""

    s: np.ndarray
    x: np.ndarray
    z0: np.ndarray
    h1: np.ndarray
    z1: np.ndarray
    h2: np.ndarray
    z2: np.ndarray
    pooled: np.ndarray
    probs: np.ndarray


def init_params(feature_dim: int, hidden_width: int, num_classes: int, seed: int) -> ModelParams:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero Adam moments."""
    if min(feature_dim, hidden_width, num_classes) < 1:
        raise ValueError("all dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    shapes = [(feature_dim, hidden_width), (hidden_width, hidden_width),
              (hidden_width, num_classes)]
    weights = tuple(rng.uniform(-1.0, 1.0, shape) / np.sqrt(shape[0]) for shape in shapes)
    zeros = lambda: tuple(np.zeros(shape) for shape in shapes)
    return ModelParams(weights=weights, adam_m=zeros(), adam_v=zeros(), step=0)


def graph_tensors(graph: Graph, feature_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(normalized adjacency, its product with the one-hot features)."""
    s = normalized_adjacency(graph)
    return s, s @ one_hot_features(graph, feature_dim)


def forward(params: ModelParams, graph: Graph) -> tuple[np.ndarray, ForwardCache]:
    """Class probabilities for one graph plus every intermediate activation."""
    s = normalized_adjacency(graph)
    x = one_hot_features(graph, params.feature_dim)
    probs, z0, h1, z1, h2, z2, pooled = kernels.forward_full(s, s @ x, *params.weights)
    return probs, ForwardCache(s, x, z0, h1, z1, h2, z2, pooled, probs)


def _batch_loss_grads(params, tensors, labels):
    """Mean loss and mean gradients over precomputed (s, sx) graph tensors."""
    loss, grads = kernels.batch_loss_grads(tensors, labels, *params.weights)
    return loss, tuple(grads)


def loss_and_grads(params: ModelParams, batch) -> tuple[float, tuple[np.ndarray, ...]]:
    """Mean cross-entropy over `batch` of (graph, label) pairs and its exact
    analytic gradients with respect to each weight matrix."""
    if not batch:
        raise ValueError("batch must be non-empty")
    tensors = [graph_tensors(g, params.feature_dim) for g, _ in batch]
    return _batch_loss_grads(params, tensors, [label for _, label in batch])


def adam_step(params: ModelParams, grads, config: TrainConfig) -> ModelParams:
    """One Adam update on grads plus coupled L2 weight decay."""
    t = params.step + 1
    bc1 = 1.0 - ADAM_BETA1 ** t
    bc2 = 1.0 - ADAM_BETA2 ** t
    new_w, new_m, new_v = [], [], []
    for w, m, v, g in zip(params.weights, params.adam_m, params.adam_v, grads):
        g = g + config.weight_decay * w
        m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g
        w = w - config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        new_w.append(w)
        new_m.append(m)
        new_v.append(v)
    return ModelParams(tuple(new_w), tuple(new_m), tuple(new_v), step=t)


def train(dataset: Dataset, config: TrainConfig) -> ModelParams:
    """Mini-batch training over the whole dataset for max_epochs epochs.

    Graph order is reshuffled each epoch by a generator seeded with
    (config.seed, epoch); the last batch of an epoch may be short.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    params = init_params(dataset.num_node_classes, config.hidden_width,
                         dataset.num_graph_classes, config.seed)
    tensors = [graph_tensors(g, dataset.num_node_classes) for g in dataset.graphs]
    labels = [g.label for g in dataset.graphs]
    n = len(dataset)
    for epoch in range(config.max_epochs):
        order = np.random.default_rng([config.seed, epoch]).permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, grads = _batch_loss_grads(params, [tensors[i] for i in idx],
                                         [labels[i] for i in idx])
            params = adam_step(params, grads, config)
    return params


def _forward_probs(params: ModelParams, graph: Graph) -> np.ndarray:
    s, sx = graph_tensors(graph, params.feature_dim)
    return kernels.forward_probs(s, sx, *params.weights)


def predict(params: ModelParams, graph: Graph) -> int:
    """Argmax class; ties break toward the smaller class index."""
    return int(np.argmax(_forward_probs(params, graph)))


def accuracy(params: ModelParams, graphs) -> float:
    """Fraction of graphs whose prediction matches their label."""
    graphs = list(graphs)
    if not graphs:
        raise ValueError("accuracy is undefined on an empty graph list")
    return sum(predict(params, g) == g.label for g in graphs) / len(graphs)


def save_params(params: ModelParams, path: str | Path) -> None:
    """Versioned binary checkpoint; round-trips exactly."""
    np.savez(
        path,
        version=np.int64(CHECKPOINT_VERSION),
        step=np.int64(params.step),
        **{f"w{i}": w for i, w in enumerate(params.weights)},
        **{f"m{i}": m for i, m in enumerate(params.adam_m)},
        **{f"v{i}": v for i, v in enumerate(params.adam_v)},
    )


def load_params(path: str | Path) -> ModelParams:
    with np.load(path) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        return ModelParams(
            weights=tuple(data[f"w{i}"] for i in range(3)),
            adam_m=tuple(data[f"m{i}"] for i in range(3)),
            adam_v=tuple(data[f"v{i}"] for i in range(3)),
            step=int(data["step"]),
        )
