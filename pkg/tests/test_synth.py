"""The synthetic benchmark facsimiles reproduce their published statistics."""

import numpy as np
import pytest

from sbag.attack import average_trigger_count, count_node_classes
from sbag.synth import BENCHMARK_NAMES, SPECS, generate

EXPECTED = {
    # name: (graphs, class sizes, node classes, avg nodes, avg edges)
    "AIDS": (2000, [400, 1600], 38, 15.69, 16.20),
    "NCI1": (4110, [2053, 2057], 37, 29.87, 32.30),
    "PROTEINS": (1113, [663, 450], 3, 39.06, 72.82),
    "ENZYMES": (600, [100] * 6, 3, 32.63, 62.14),
}


@pytest.mark.parametrize("name", BENCHMARK_NAMES)
def test_summary_statistics(name):
    count, class_sizes, node_classes, avg_nodes, avg_edges = EXPECTED[name]
    ds = generate(name)
    assert len(ds) == count
    assert ds.class_counts() == class_sizes
    assert ds.num_node_classes == node_classes
    assert abs(np.mean([g.num_nodes for g in ds.graphs]) - avg_nodes) <= 0.01
    assert abs(np.mean([len(g.edges) for g in ds.graphs]) - avg_edges) <= 0.01


def test_aids_presence_table_rows():
    stats = count_node_classes(generate("AIDS"))
    assert stats.counts[0].tolist() == [400, 1570]
    assert stats.counts[1].tolist() == [385, 1177]
    assert stats.counts[7].tolist() == [42, 49]
    assert stats.counts[8].tolist() == [50, 10]
    assert stats.counts[37].tolist() == [0, 1]


@pytest.mark.parametrize("name,k", [("AIDS", 1.37), ("NCI1", 2.72),
                                    ("PROTEINS", 15.78), ("ENZYMES", 10.65)])
def test_trigger_multiplicities(name, k):
    spec = SPECS[name]()
    assert average_trigger_count(generate(name), spec.trigger_class) == pytest.approx(k, abs=0.02)


def test_generation_deterministic():
    assert generate("ENZYMES") == generate("ENZYMES")
    assert generate("ENZYMES", seed=8) != generate("ENZYMES", seed=9)


def test_graphs_are_connected_trees_plus_extras():
    ds = generate("ENZYMES")
    for g in ds.graphs[:50]:
        assert len(g.edges) >= g.num_nodes - 1
        # union-find connectivity
        parent = list(range(g.num_nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in g.edges:
            parent[find(a)] = find(b)
        assert len({find(i) for i in range(g.num_nodes)}) == 1


def test_unknown_benchmark_rejected():
    with pytest.raises(ValueError):
        generate("MUTAG")
