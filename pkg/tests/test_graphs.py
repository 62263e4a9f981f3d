"""Graph sample invariants and the dense matrix views."""

import numpy as np
import pytest

from sbag.graphs import Dataset, Graph, MalformedDatasetError, normalized_adjacency, one_hot_features

from conftest import random_graph


def test_one_hot_single_row():
    g = Graph(0, (0,), (), 0)
    assert one_hot_features(g, 2).tolist() == [[1.0, 0.0]]


def test_one_hot_two_rows():
    g = Graph(0, (2, 0), ((0, 1),), 0)
    assert one_hot_features(g, 3).tolist() == [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]


def test_one_hot_rejects_class_out_of_range():
    g = Graph(0, (2,), (), 0)
    with pytest.raises(MalformedDatasetError):
        one_hot_features(g, 2)


def test_one_hot_rows_sum_to_one_randomized():
    rng = np.random.default_rng(0)
    for _ in range(25):
        g = random_graph(rng, int(rng.integers(1, 20)), 5)
        x = one_hot_features(g, 5)
        assert np.all(x.sum(axis=1) == 1.0)


def test_one_hot_rows_sum_to_one_on_aids(aids):
    for g in aids.graphs:
        assert np.all(one_hot_features(g, aids.num_node_classes).sum(axis=1) == 1.0)


def test_normalized_adjacency_isolated_node():
    assert normalized_adjacency(Graph(0, (0,), (), 0)).tolist() == [[1.0]]


def test_normalized_adjacency_single_edge():
    s = normalized_adjacency(Graph(0, (0, 0), ((0, 1),), 0))
    assert np.allclose(s, 0.5)


def test_normalized_adjacency_triangle():
    s = normalized_adjacency(Graph(0, (0, 0, 0), ((0, 1), (1, 2), (0, 2)), 0))
    assert np.allclose(s, 1.0 / 3.0)


def test_normalized_adjacency_exactly_symmetric():
    rng = np.random.default_rng(1)
    for _ in range(25):
        s = normalized_adjacency(random_graph(rng, int(rng.integers(2, 25)), 4))
        assert np.array_equal(s, s.T)


def test_row_sum_bound():
    rng = np.random.default_rng(2)
    for _ in range(25):
        g = random_graph(rng, int(rng.integers(1, 25)), 4)
        s = normalized_adjacency(g)
        deg = np.count_nonzero(s, axis=1)
        assert np.all(s.sum(axis=1) <= np.sqrt(deg) + 1e-12)


def test_matrices_permute_with_node_order():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(2, 15)), 4)
        perm = rng.permutation(g.num_nodes)
        inv = np.argsort(perm)
        permuted = Graph(
            id=g.id,
            node_classes=tuple(g.node_classes[int(p)] for p in perm),
            edges=tuple(sorted(tuple(sorted((int(inv[a]), int(inv[b])))) for a, b in g.edges)),
            label=g.label,
        )
        s, sp = normalized_adjacency(g), normalized_adjacency(permuted)
        x, xp = one_hot_features(g, 4), one_hot_features(permuted, 4)
        assert np.array_equal(sp, s[np.ix_(perm, perm)])
        assert np.array_equal(xp, x[perm])


def test_graph_rejects_self_loop():
    with pytest.raises(MalformedDatasetError):
        Graph(0, (0, 1), ((1, 1),), 0)


def test_graph_rejects_duplicate_edge():
    with pytest.raises(MalformedDatasetError):
        Graph(0, (0, 1), ((0, 1), (1, 0)), 0)


def test_graph_rejects_dangling_edge():
    with pytest.raises(MalformedDatasetError):
        Graph(0, (0, 1), ((0, 2),), 0)


def test_graph_rejects_empty():
    with pytest.raises(MalformedDatasetError):
        Graph(0, (), (), 0)


def test_dataset_requires_dense_ids():
    g = Graph(1, (0,), (), 0)
    with pytest.raises(MalformedDatasetError):
        Dataset("bad", (g,), 1, 1)


def test_dataset_rejects_label_out_of_range():
    g = Graph(0, (0,), (), 3)
    with pytest.raises(MalformedDatasetError):
        Dataset("bad", (g,), 1, 2)
