"""Reader and writer for the TUDataset plain-text benchmark format.

A dataset `NAME` is four files (1-based indices on disk):

    NAME_A.txt               one "i, j" edge endpoint pair per line
    NAME_graph_indicator.txt line i holds the graph id of node i
    NAME_graph_labels.txt    line g holds the label of graph g
    NAME_node_labels.txt     line i holds the node label of node i

Optional files (`NAME_node_attributes.txt`, `NAME_edge_labels.txt`) are
ignored: node identity is the node label alone. On-disk node and graph
labels are remapped to dense 0-based indices in ascending on-disk order;
the mapping is recorded in the :class:`ParseReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .graphs import Dataset, Graph, MalformedDatasetError

REQUIRED_SUFFIXES = ("_A.txt", "_graph_indicator.txt", "_graph_labels.txt", "_node_labels.txt")


class DatasetNotFoundError(FileNotFoundError):
    """A required dataset file is missing."""


class StratificationError(ValueError):
    """A graph class is too small to stratify."""


@dataclass(frozen=True)
class ParseReport:
    """What the parser did: sizes, label remaps, per-class counts."""

    name: str
    graph_count: int
    node_class_remap: dict[int, int]   # on-disk node label -> dense index
    graph_class_remap: dict[int, int]  # on-disk graph label -> dense index
    class_counts: dict[int, int]       # dense graph class -> number of graphs
    node_identity_source: str = "node_labels"


def _dataset_dir(root: Path, name: str) -> Path:
    """TUDataset archives unpack to <root>/<name>/<name>_*.txt; accept both layouts."""
    nested = root / name
    if (nested / f"{name}_A.txt").is_file():
        return nested
    return root


def _read_int_column(path: Path) -> list[int]:
    values = []
    with open(path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            tok = raw.strip()
            if not tok:
                continue  # tolerate a trailing blank line
            try:
                values.append(int(tok))
            except ValueError:
                raise MalformedDatasetError(
                    f"{path.name}:{lineno}: non-integer token {tok!r}"
                ) from None
    return values


def parse_dataset(root_directory: str | Path, name: str) -> tuple[Dataset, ParseReport]:
    """Parse the four TUDataset files under `root_directory` into a Dataset.

    Raises :class:`DatasetNotFoundError` if a required file is missing and
    :class:`MalformedDatasetError` (naming the offending line) on dangling
    node indices, non-integer tokens, or inconsistent record counts.
    """
    root = _dataset_dir(Path(root_directory), name)
    paths = {suf: root / f"{name}{suf}" for suf in REQUIRED_SUFFIXES}
    for path in paths.values():
        if not path.is_file():
            raise DatasetNotFoundError(f"required dataset file not found: {path}")

    indicator = _read_int_column(paths["_graph_indicator.txt"])
    node_labels_disk = _read_int_column(paths["_node_labels.txt"])
    graph_labels_disk = _read_int_column(paths["_graph_labels.txt"])
    num_nodes = len(indicator)

    if len(node_labels_disk) != num_nodes:
        longer, shorter = ("_node_labels.txt", "_graph_indicator.txt")
        if len(node_labels_disk) < num_nodes:
            longer, shorter = shorter, longer
        raise MalformedDatasetError(
            f"{name}{longer}:{min(len(node_labels_disk), num_nodes) + 1}: "
            f"node record without a counterpart in {name}{shorter} "
            f"({num_nodes} nodes assigned to graphs, {len(node_labels_disk)} node labels)"
        )

    disk_gids = sorted(set(indicator))
    if len(graph_labels_disk) != len(disk_gids):
        raise MalformedDatasetError(
            f"{name}_graph_labels.txt:{min(len(graph_labels_disk), len(disk_gids)) + 1}: "
            f"{len(graph_labels_disk)} graph labels for {len(disk_gids)} graphs"
        )
    gid_to_dense = {gid: i for i, gid in enumerate(disk_gids)}

    # Per-graph node membership in file order; node ids are 1-based on disk.
    members: list[list[int]] = [[] for _ in disk_gids]
    node_pos: list[int] = [0] * num_nodes  # node -> index within its graph
    node_graph: list[int] = [0] * num_nodes
    for node0, gid in enumerate(indicator):
        if gid not in gid_to_dense:
            raise MalformedDatasetError(
                f"{name}_graph_indicator.txt:{node0 + 1}: unknown graph id {gid}"
            )
        dense = gid_to_dense[gid]
        node_graph[node0] = dense
        node_pos[node0] = len(members[dense])
        members[dense].append(node0)

    edge_sets: list[set[tuple[int, int]]] = [set() for _ in disk_gids]
    a_path = paths["_A.txt"]
    with open(a_path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise MalformedDatasetError(
                    f"{a_path.name}:{lineno}: expected 'i, j', got {line!r}"
                )
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise MalformedDatasetError(
                    f"{a_path.name}:{lineno}: non-integer token in {line!r}"
                ) from None
            for v in (a, b):
                if not (1 <= v <= num_nodes):
                    raise MalformedDatasetError(
                        f"{a_path.name}:{lineno}: node index {v} has no graph assignment "
                        f"(dataset has {num_nodes} nodes)"
                    )
            if a == b:
                raise MalformedDatasetError(f"{a_path.name}:{lineno}: self-loop on node {a}")
            ga, gb = node_graph[a - 1], node_graph[b - 1]
            if ga != gb:
                raise MalformedDatasetError(
                    f"{a_path.name}:{lineno}: edge ({a}, {b}) crosses graphs "
                    f"{disk_gids[ga]} and {disk_gids[gb]}"
                )
            i, j = node_pos[a - 1], node_pos[b - 1]
            edge_sets[ga].add((i, j) if i < j else (j, i))

    node_remap = {v: i for i, v in enumerate(sorted(set(node_labels_disk)))}
    graph_remap = {v: i for i, v in enumerate(sorted(set(graph_labels_disk)))}

    graphs = []
    for dense, nodes in enumerate(members):
        graphs.append(Graph(
            id=dense,
            node_classes=tuple(node_remap[node_labels_disk[n]] for n in nodes),
            edges=tuple(sorted(edge_sets[dense])),
            label=graph_remap[graph_labels_disk[dense]],
        ))

    dataset = Dataset(
        name=name,
        graphs=tuple(graphs),
        num_node_classes=len(node_remap),
        num_graph_classes=len(graph_remap),
    )
    counts = {c: n for c, n in enumerate(dataset.class_counts())}
    report = ParseReport(
        name=name,
        graph_count=len(dataset),
        node_class_remap=node_remap,
        graph_class_remap=graph_remap,
        class_counts=counts,
    )
    return dataset, report


def write_dataset(dataset: Dataset, root_directory: str | Path) -> Path:
    """Write `dataset` in the four-file TUDataset format under <root>/<name>/.

    Dense indices are written as-is, so parsing the result reproduces the
    dataset exactly. Edges are emitted in both directions, matching the
    distributed files.
    """
    out = Path(root_directory) / dataset.name
    out.mkdir(parents=True, exist_ok=True)
    name = dataset.name

    node_base = []  # 1-based id of each graph's first node
    total = 0
    for g in dataset.graphs:
        node_base.append(total + 1)
        total += g.num_nodes

    with open(out / f"{name}_A.txt", "w", encoding="ascii") as fh:
        for g in dataset.graphs:
            base = node_base[g.id]
            directed = sorted([(base + i, base + j) for i, j in g.edges]
                              + [(base + j, base + i) for i, j in g.edges])
            for a, b in directed:
                fh.write(f"{a}, {b}\n")
    with open(out / f"{name}_graph_indicator.txt", "w", encoding="ascii") as fh:
        for g in dataset.graphs:
            fh.write(f"{g.id + 1}\n" * g.num_nodes)
    with open(out / f"{name}_graph_labels.txt", "w", encoding="ascii") as fh:
        for g in dataset.graphs:
            fh.write(f"{g.label}\n")
    with open(out / f"{name}_node_labels.txt", "w", encoding="ascii") as fh:
        for g in dataset.graphs:
            for c in g.node_classes:
                fh.write(f"{c}\n")
    return out


def stratified_split(dataset: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Per-class split into train/test, deterministic for a fixed seed.

    Each class contributes at least floor(fraction * class_count) graphs to
    train; leftover slots up to round(fraction * |dataset|) go to the classes
    with the largest fractional remainders (ties toward the smaller class
    index). Both returned datasets are re-indexed densely, preserving the
    original graph order.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_class: dict[int, list[int]] = {c: [] for c in range(dataset.num_graph_classes)}
    for g in dataset.graphs:
        by_class[g.label].append(g.id)
    for c, ids in by_class.items():
        if len(ids) < 2:
            raise StratificationError(
                f"dataset {dataset.name}: class {c} has {len(ids)} graphs, need >= 2"
            )

    target = int(round(train_fraction * len(dataset)))
    quotas = {}
    remainders = []
    for c in sorted(by_class):
        exact = train_fraction * len(by_class[c])
        quotas[c] = int(np.floor(exact))
        remainders.append((-(exact - quotas[c]), c))
    leftover = target - sum(quotas.values())
    for _, c in sorted(remainders)[:max(leftover, 0)]:
        quotas[c] += 1

    rng = np.random.default_rng(seed)
    train_ids: set[int] = set()
    for c in sorted(by_class):
        ids = by_class[c]
        order = rng.permutation(len(ids))
        train_ids.update(ids[i] for i in order[: quotas[c]])

    def subset(ids: list[int]) -> Dataset:
        graphs = tuple(replace(dataset.graphs[g], id=new) for new, g in enumerate(ids))
        return Dataset(dataset.name, graphs, dataset.num_node_classes, dataset.num_graph_classes)

    train = subset([g.id for g in dataset.graphs if g.id in train_ids])
    test = subset([g.id for g in dataset.graphs if g.id not in train_ids])
    return train, test
