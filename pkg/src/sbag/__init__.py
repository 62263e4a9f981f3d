"""Semantic-trigger backdoor lab for GCN graph classification.

Train clean and backdoored graph convolutional networks from scratch on
TUDataset-format benchmarks, run the trigger-selection/poisoning pipeline,
and measure attack success rate and clean-accuracy drop.
"""

from .graphs import Dataset, Graph, MalformedDatasetError, normalized_adjacency, one_hot_features
from .tudata import (DatasetNotFoundError, ParseReport, StratificationError,
                     parse_dataset, stratified_split, write_dataset)
from .gcn import (ModelParams, TrainConfig, accuracy, adam_step, forward, init_params,
                  load_params, loss_and_grads, predict, save_params, train)
from .attack import (NodeClassStats, PoisonPlan, TriggerAbsentError, average_trigger_count,
                     build_poisoned_dataset, candidate_samples, count_node_classes,
                     inject_trigger, poison_budget, score_candidates, select_trigger)
from .evaluate import (EvalReport, SweepResult, attack_success_rate, clean_accuracy_drop,
                       run_injected_experiment, run_sweep, split_test_sets,
                       sweep_poison_rates)

__version__ = "0.1.0"
