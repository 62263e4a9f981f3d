"""Semantic-trigger poisoning pipeline.

The attack relabels a budgeted number of training graphs that naturally
contain a chosen trigger node class: count per-class presence statistics,
pick the node class whose non-target presence count sits closest to the
poison budget, rank the candidate graphs by how much zeroing the trigger
features moves a scoring model's confidence, and relabel the top scorers to
the target label. Trigger injection (for evaluating modified test samples)
rewrites node classes only, never topology.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .gcn import ModelParams
from .graphs import Dataset, Graph, normalized_adjacency, one_hot_features


class TriggerAbsentError(ValueError):
    """No graph in the dataset contains the trigger node class."""


@dataclass(frozen=True)
class NodeClassStats:
    """counts[node_class, graph_class] = graphs of that class containing the
    node class at least once (presence, not node multiplicity)."""

    counts: np.ndarray

    def num(self, node_class: int, graph_class: int) -> int:
        return int(self.counts[node_class, graph_class])

    def num_excluding(self, node_class: int, target_label: int) -> int:
        """Presence count summed over every graph class except the target."""
        row = self.counts[node_class]
        return int(row.sum() - row[target_label])


@dataclass(frozen=True)
class PoisonPlan:
    """Everything needed to audit or replay one poisoning run."""

    trigger_class: int
    target_label: int
    poison_budget: int
    candidate_scores: dict[int, float]  # graph id -> score, in id order
    poisoned_ids: tuple[int, ...]
    shortfall: bool  # fewer candidates than the budget

    def __post_init__(self):
        if not set(self.poisoned_ids) <= set(self.candidate_scores):
            raise ValueError("poisoned_ids must be a subset of the candidates")


def count_node_classes(train: Dataset) -> NodeClassStats:
    """Per-graph presence counts of each node class within each graph class."""
    counts = np.zeros((train.num_node_classes, train.num_graph_classes), dtype=np.int64)
    for g in train.graphs:
        for c in set(g.node_classes):
            counts[c, g.label] += 1
    return NodeClassStats(counts)


def poison_budget(dataset_size: int, p: float) -> int:
    """Number of samples to poison: dataset size times the rate, rounded."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"poisoning rate must be in (0, 1), got {p}")
    return int(round(dataset_size * p))


def select_trigger(stats: NodeClassStats, target_label: int, num_p: int) -> int:
    """Node class whose non-target presence count is closest to the budget.

    Ties break toward the smaller node-class index.
    """
    if stats.counts.size == 0:
        raise ValueError("empty node-class statistics")
    nontarget = stats.counts.sum(axis=1) - stats.counts[:, target_label]
    return int(np.argmin(np.abs(nontarget - num_p)))


def candidate_samples(train: Dataset, trigger_class: int, target_label: int) -> list[int]:
    """Ids of graphs containing the trigger with a non-target label, in id order."""
    return [g.id for g in train.graphs
            if g.label != target_label and trigger_class in g.node_classes]


def score_candidates(score_model: ModelParams, train: Dataset, candidates,
                     trigger_class: int) -> dict[int, float]:
    """Score each candidate by the confidence shift under trigger-feature zeroing.

    For candidate g, build g' by zeroing the one-hot feature rows of every
    trigger-class node (topology untouched, stored graph untouched); the
    score is |probs(g)[label] - probs(g')[label]|.
    """
    w = score_model.weights
    scores: dict[int, float] = {}
    for gid in candidates:
        g = train.graphs[gid]
        rows = [i for i, c in enumerate(g.node_classes) if c == trigger_class]
        if not rows:
            raise RuntimeError(f"candidate graph {gid} contains no trigger node")
        s = normalized_adjacency(g)
        x = one_hot_features(g, score_model.feature_dim)
        base = kernels.forward_probs(s, s @ x, *w)[g.label]
        x[rows, :] = 0.0
        masked = kernels.forward_probs(s, s @ x, *w)[g.label]
        scores[gid] = abs(float(base) - float(masked))
    return scores


def build_poisoned_dataset(train: Dataset, trigger_class: int, target_label: int,
                           num_p: int, scores: dict[int, float]) -> tuple[Dataset, PoisonPlan]:
    """Relabel the top-scoring candidates to the target label.

    Exactly min(num_p, #candidates) graphs are relabeled (score ties toward
    the smaller id); everything else, including all topologies and node
    classes, is unchanged. A candidate shortfall is flagged, not an error.
    """
    ranked = sorted(scores, key=lambda gid: (-scores[gid], gid))
    chosen = tuple(sorted(ranked[:max(num_p, 0)]))
    poisoned = tuple(
        replace(g, label=target_label) if g.id in set(chosen) else g
        for g in train.graphs
    )
    plan = PoisonPlan(
        trigger_class=trigger_class,
        target_label=target_label,
        poison_budget=num_p,
        candidate_scores=dict(sorted(scores.items())),
        poisoned_ids=chosen,
        shortfall=len(scores) < num_p,
    )
    dataset = Dataset(train.name, poisoned, train.num_node_classes, train.num_graph_classes)
    return dataset, plan


def average_trigger_count(train: Dataset, trigger_class: int) -> float:
    """Mean trigger-node multiplicity over the graphs that contain the trigger."""
    occurrences = 0
    carriers = 0
    for g in train.graphs:
        hits = sum(1 for c in g.node_classes if c == trigger_class)
        if hits:
            occurrences += hits
            carriers += 1
    if carriers == 0:
        raise TriggerAbsentError(
            f"no graph in {train.name} contains node class {trigger_class}"
        )
    return occurrences / carriers


def inject_trigger(graph: Graph, trigger_class: int, count: int, seed: int) -> Graph:
    """Rewrite `count` randomly chosen non-trigger nodes to the trigger class.

    Edges are untouched. If fewer than `count` non-trigger nodes exist, all
    of them are converted. count <= 0 is a warned no-op.
    """
    if count <= 0:
        warnings.warn(f"inject_trigger called with count={count}; graph unchanged")
        return graph
    non_trigger = [i for i, c in enumerate(graph.node_classes) if c != trigger_class]
    take = min(count, len(non_trigger))
    rng = np.random.default_rng(seed)
    chosen = set(rng.choice(len(non_trigger), size=take, replace=False).tolist())
    classes = list(graph.node_classes)
    for pos in chosen:
        classes[non_trigger[pos]] = trigger_class
    return replace(graph, node_classes=tuple(classes))
