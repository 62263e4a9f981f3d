"""Shared fixtures: benchmark data root and small constructed datasets.

Real benchmark files are used when SBAG_DATA_ROOT points at a directory
containing them; otherwise the synthetic facsimiles are generated once per
session into a temporary directory.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from sbag.graphs import Dataset, Graph
from sbag.synth import write_benchmarks
from sbag.tudata import parse_dataset


@pytest.fixture(scope="session")
def data_root(tmp_path_factory) -> Path:
    env = os.environ.get("SBAG_DATA_ROOT")
    if env:
        return Path(env)
    root = tmp_path_factory.mktemp("benchdata")
    write_benchmarks(root)
    return root


@pytest.fixture(scope="session")
def aids(data_root) -> Dataset:
    return parse_dataset(data_root, "AIDS")[0]


def random_graph(rng: np.random.Generator, num_nodes: int, num_node_classes: int,
                 num_graph_classes: int = 2, gid: int = 0) -> Graph:
    """Random connected graph: spanning tree plus a few extra edges."""
    classes = tuple(int(c) for c in rng.integers(0, num_node_classes, num_nodes))
    edges = {(int(rng.integers(0, i)), i) for i in range(1, num_nodes)}
    for _ in range(int(rng.integers(0, num_nodes))):
        i, j = int(rng.integers(0, num_nodes)), int(rng.integers(0, num_nodes))
        if i != j:
            edges.add((min(i, j), max(i, j)))
    return Graph(id=gid, node_classes=classes, edges=tuple(sorted(edges)),
                 label=int(rng.integers(0, num_graph_classes)))


def majority_label_dataset(num_graphs: int = 60, seed: int = 3) -> Dataset:
    """Separable-by-construction task: the label is the majority node class."""
    rng = np.random.default_rng(seed)
    graphs = []
    for gid in range(num_graphs):
        n = int(rng.integers(5, 12))
        major = gid % 2
        count_major = n // 2 + 1 + int(rng.integers(0, n - n // 2 - 1))
        classes = [major] * count_major + [1 - major] * (n - count_major)
        rng.shuffle(classes)
        edges = tuple(sorted((int(rng.integers(0, i)), i) for i in range(1, n)))
        graphs.append(Graph(id=gid, node_classes=tuple(classes), edges=edges, label=major))
    return Dataset("TOY", tuple(graphs), num_node_classes=2, num_graph_classes=2)


@pytest.fixture(scope="session")
def toy_dataset() -> Dataset:
    return majority_label_dataset()
