"""Graph samples and the dense linear-algebra views every other module consumes.

A :class:`Graph` is one labeled sample: a class index per node plus an
undirected edge list (self-loops are added only during normalization).
A :class:`Dataset` is a named, immutable collection of graphs with dense
0-based node-class and graph-class alphabets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MalformedDatasetError(ValueError):
    """A graph, dataset, or on-disk record violates a structural invariant."""


@dataclass(frozen=True)
class Graph:
    """One labeled graph sample.

    `node_classes[i]` is the class of node `i`; `edges` holds each unordered
    pair exactly once with no self-loops; `label` is the graph class.
    """

    id: int
    node_classes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    label: int

    def __post_init__(self):
        n = len(self.node_classes)
        if n < 1:
            raise MalformedDatasetError(f"graph {self.id}: has no nodes")
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise MalformedDatasetError(f"graph {self.id}: self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise MalformedDatasetError(
                    f"graph {self.id}: edge ({a}, {b}) references a node outside 0..{n - 1}"
                )
            key = (a, b) if a < b else (b, a)
            if key in seen:
                raise MalformedDatasetError(f"graph {self.id}: duplicate edge {key}")
            seen.add(key)

    @property
    def num_nodes(self) -> int:
        return len(self.node_classes)


@dataclass(frozen=True)
class Dataset:
    """A named collection of graphs with dense class alphabets."""

    name: str
    graphs: tuple[Graph, ...]
    num_node_classes: int
    num_graph_classes: int

    def __post_init__(self):
        for pos, g in enumerate(self.graphs):
            if g.id != pos:
                raise MalformedDatasetError(
                    f"dataset {self.name}: graph ids must be dense 0..{len(self.graphs) - 1}, "
                    f"position {pos} holds id {g.id}"
                )
            if not (0 <= g.label < self.num_graph_classes):
                raise MalformedDatasetError(
                    f"dataset {self.name}: graph {g.id} label {g.label} out of range"
                )
            bad = [c for c in g.node_classes if not (0 <= c < self.num_node_classes)]
            if bad:
                raise MalformedDatasetError(
                    f"dataset {self.name}: graph {g.id} node class {bad[0]} out of range"
                )

    def __len__(self) -> int:
        return len(self.graphs)

    def class_counts(self) -> list[int]:
        """Number of graphs per graph class."""
        counts = [0] * self.num_graph_classes
        for g in self.graphs:
            counts[g.label] += 1
        return counts


def one_hot_features(graph: Graph, num_node_classes: int) -> np.ndarray:
    """N x D feature matrix: row i is the one-hot encoding of node i's class."""
    n = graph.num_nodes
    if max(graph.node_classes) >= num_node_classes:
        raise MalformedDatasetError(
            f"graph {graph.id}: node class {max(graph.node_classes)} "
            f">= {num_node_classes} declared classes"
        )
    x = np.zeros((n, num_node_classes))
    x[np.arange(n), list(graph.node_classes)] = 1.0
    return x


def normalized_adjacency(graph: Graph) -> np.ndarray:
    """Symmetrically normalized adjacency with self-loops.

    Entry (i, j) is 1/sqrt(d_i * d_j) when i == j or {i, j} is an edge,
    where d is the degree after adding self-loops. The result is exactly
    symmetric (constructed from an elementwise product of symmetric factors).
    """
    n = graph.num_nodes
    a = np.eye(n)
    for i, j in graph.edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    inv_sqrt_deg = 1.0 / np.sqrt(a.sum(axis=1))
    return a * np.outer(inv_sqrt_deg, inv_sqrt_deg)
