"""Attack metrics and the end-to-end experimental protocol.

For each (dataset, seed): stratified 80/20 split, clean model, scoring
model, then per poisoning rate a backdoored model evaluated for benign
accuracy, clean-accuracy drop, attack success on unmodified trigger-bearing
test samples, and attack success on trigger-free samples after injection of
[k] and [k]+1 trigger nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attack import (PoisonPlan, average_trigger_count, build_poisoned_dataset,
                     candidate_samples, count_node_classes, inject_trigger,
                     poison_budget, score_candidates, select_trigger)
from .gcn import ModelParams, TrainConfig, accuracy, predict, train
from .graphs import Dataset, Graph
from .tudata import stratified_split

# Offset deriving the scoring model's seed from the experiment seed, so the
# scoring model is a distinct network trained on the same clean split.
SCORING_SEED_OFFSET = 100003

TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class EvalReport:
    """All metrics of one experiment cell (dataset, poisoning rate, seed).

    `asr_unmodified` / `asr_injected` are None when the corresponding test
    subset is empty (undefined, never silently 0). `cad` is the raw signed
    clean-accuracy drop; `cad_clamped` floors it at zero, matching the usual
    reporting convention when the backdoored model outperforms.
    """

    dataset: str
    seed: int
    rate: float
    target_label: int
    trigger_class: int
    k: float
    num_p: int
    num_poisoned: int
    shortfall: bool
    clean_accuracy: float
    benign_accuracy: float
    cad: float
    cad_clamped: float
    asr_unmodified: float | None
    asr_injected: dict[int, float] | None
    injected_counts_promoted: bool
    subset_sizes: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class CellResult:
    report: EvalReport
    plan: PoisonPlan
    model: ModelParams


@dataclass(frozen=True)
class SweepResult:
    """One seed's sweep: shared clean/scoring models plus one cell per rate."""

    dataset: str
    seed: int
    target_label: int
    trigger_class: int
    clean_model: ModelParams
    scoring_model: ModelParams
    clean_accuracy: float
    cells: tuple[CellResult, ...]


def split_test_sets(test: Dataset, trigger_class: int, target_label: int):
    """Partition the test split for evaluation.

    Returns (attack_unmodified, benign, injectable): non-target graphs
    containing the trigger; every remaining graph; and the benign subset of
    non-target graphs with no trigger node (injection candidates).
    """
    attack_unmodified: list[Graph] = []
    benign: list[Graph] = []
    injectable: list[Graph] = []
    for g in test.graphs:
        nontarget = g.label != target_label
        has_trigger = trigger_class in g.node_classes
        if nontarget and has_trigger:
            attack_unmodified.append(g)
        else:
            benign.append(g)
            if nontarget:
                injectable.append(g)
    return attack_unmodified, benign, injectable


def attack_success_rate(model: ModelParams, attack_graphs, target_label: int) -> float:
    """Fraction of attack graphs classified as the target label."""
    attack_graphs = list(attack_graphs)
    if not attack_graphs:
        raise ValueError("attack success rate is undefined on an empty sample set")
    hits = sum(predict(model, g) == target_label for g in attack_graphs)
    return hits / len(attack_graphs)


def clean_accuracy_drop(clean_acc: float, benign_acc: float) -> float:
    """Signed drop; negative when the backdoored model outperforms."""
    return clean_acc - benign_acc


def injection_counts(k: float) -> tuple[list[int], bool]:
    """Node counts to inject: floor(k) and floor(k)+1, with floor(k)=0
    promoted to 1 (the promoted set degenerates to {1})."""
    base = math.floor(k)
    promoted = base == 0
    return sorted({max(base, 1), base + 1}), promoted


def run_injected_experiment(model: ModelParams, injectable, trigger_class: int,
                            k: float, target_label: int, seed: int) -> dict[int, float]:
    """ASR after injecting [k] and [k]+1 trigger nodes into every injectable
    graph, one seeded random placement per graph."""
    injectable = list(injectable)
    if not injectable:
        raise ValueError("no injectable graphs: every non-target sample has the trigger")
    counts, _ = injection_counts(k)
    result: dict[int, float] = {}
    for count in counts:
        hits = 0
        for g in injectable:
            g_seed = int(np.random.SeedSequence([seed, count, g.id]).generate_state(1)[0])
            hits += predict(model, inject_trigger(g, trigger_class, count, g_seed)) == target_label
        result[count] = hits / len(injectable)
    return result


def run_sweep(dataset: Dataset, rates, config: TrainConfig, target_label: int,
              seed: int, scoring_config: TrainConfig | None = None) -> SweepResult:
    """Full protocol for one seed across a list of poisoning rates.

    The split, clean model, scoring model, trigger choice, and candidate
    scores are computed once and shared; the trigger is selected at the
    largest requested rate and held fixed across the sweep. The scoring
    model reuses `config` with a derived seed unless `scoring_config`
    overrides it.
    """
    rates = list(rates)
    if not rates:
        raise ValueError("no poisoning rates given")
    if not (0 <= target_label < dataset.num_graph_classes):
        raise ValueError(f"target label {target_label} invalid for {dataset.name}")

    cfg = TrainConfig(**{**config.__dict__, "seed": seed})
    train_split, test_split = stratified_split(dataset, TRAIN_FRACTION, seed)
    clean_model = train(train_split, cfg)
    clean_acc = accuracy(clean_model, test_split.graphs)

    scoring_cfg = scoring_config or TrainConfig(
        **{**cfg.__dict__, "seed": seed + SCORING_SEED_OFFSET})
    scoring_model = train(train_split, scoring_cfg)

    stats = count_node_classes(train_split)
    trigger = select_trigger(stats, target_label, poison_budget(len(train_split), max(rates)))
    k = average_trigger_count(train_split, trigger)
    candidates = candidate_samples(train_split, trigger, target_label)
    scores = score_candidates(scoring_model, train_split, candidates, trigger)

    attack_unmod, benign, injectable = split_test_sets(test_split, trigger, target_label)
    subset_sizes = {
        "test": len(test_split),
        "attack_unmodified": len(attack_unmod),
        "benign": len(benign),
        "injectable": len(injectable),
    }
    counts, promoted = injection_counts(k)

    cells = []
    for rate in rates:
        num_p = poison_budget(len(train_split), rate)
        poisoned, plan = build_poisoned_dataset(train_split, trigger, target_label,
                                                num_p, scores)
        model = train(poisoned, cfg)
        benign_acc = accuracy(model, benign)
        asr = attack_success_rate(model, attack_unmod, target_label) if attack_unmod else None
        asr_injected = (run_injected_experiment(model, injectable, trigger, k,
                                                target_label, seed)
                        if injectable else None)
        cad = clean_accuracy_drop(clean_acc, benign_acc)
        report = EvalReport(
            dataset=dataset.name,
            seed=seed,
            rate=rate,
            target_label=target_label,
            trigger_class=trigger,
            k=k,
            num_p=num_p,
            num_poisoned=len(plan.poisoned_ids),
            shortfall=plan.shortfall,
            clean_accuracy=clean_acc,
            benign_accuracy=benign_acc,
            cad=cad,
            cad_clamped=max(cad, 0.0),
            asr_unmodified=asr,
            asr_injected=asr_injected,
            injected_counts_promoted=promoted,
            subset_sizes=subset_sizes,
        )
        cells.append(CellResult(report=report, plan=plan, model=model))

    return SweepResult(
        dataset=dataset.name,
        seed=seed,
        target_label=target_label,
        trigger_class=trigger,
        clean_model=clean_model,
        scoring_model=scoring_model,
        clean_accuracy=clean_acc,
        cells=tuple(cells),
    )


def sweep_poison_rates(dataset: Dataset, rates, config: TrainConfig,
                       target_label: int, seed: int) -> list[EvalReport]:
    """Reports only, one per rate; [] for an empty rate list."""
    if not list(rates):
        return []
    return [cell.report for cell in run_sweep(dataset, rates, config, target_label, seed).cells]
