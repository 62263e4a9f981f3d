"""Command-line front end.

Subcommands:
    inspect      parse a dataset and print its statistics
    train-clean  train and checkpoint a clean model, report test accuracy
    attack       full poisoning pipeline per rate per repeat, all artifacts
    sweep        like attack, but writes reports/plans/summary only

Configuration is accepted as flags and/or a JSON config file (--config);
flags win on conflict. Existing output files are never overwritten unless
--overwrite is passed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .evaluate import TRAIN_FRACTION, SweepResult, run_sweep
from .gcn import TrainConfig, accuracy, save_params, train
from .graphs import MalformedDatasetError
from .reports import report_text, summary_csv
from .tudata import DatasetNotFoundError, parse_dataset, stratified_split

# Experiment-table defaults.
DEFAULT_TARGET_LABELS = {"AIDS": 0, "NCI1": 0, "PROTEINS": 1, "ENZYMES": 5}
DEFAULT_RATES = {
    "AIDS": [0.01, 0.02, 0.03],
    "NCI1": [0.01, 0.02, 0.03],
    "PROTEINS": [0.01, 0.02, 0.03],
    "ENZYMES": [0.01, 0.02, 0.03, 0.05],
}


@dataclasses.dataclass
class ExperimentConfig:
    """Resolved CLI configuration for one invocation."""

    dataset: str
    data_root: Path
    out_dir: Path
    target_label: int
    rates: list[float]
    seed: int = 0
    repeats: int = 1
    workers: int = 1
    overwrite: bool = False
    train: TrainConfig = dataclasses.field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        for rate in self.rates:
            if not (0.0 < rate < 1.0):
                raise ValueError(f"poisoning rate {rate} not in (0, 1)")


class CliError(Exception):
    """User-facing error; printed without a traceback."""


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--dataset", help="dataset name, e.g. AIDS")
    parser.add_argument("--data-root", help="directory holding the dataset files")
    parser.add_argument("--config", help="JSON config file; flags win on conflict")
    parser.add_argument("--seed", type=int, help="base experiment seed (default 0)")
    parser.add_argument("--out", help="output directory (default results)")
    parser.add_argument("--rates", help="comma-separated poisoning rates, e.g. 0.01,0.03")
    parser.add_argument("--target-label", type=int, help="attacker-chosen target class")
    parser.add_argument("--repeats", type=int, help="seeded repeats (seed, seed+1, ...)")
    parser.add_argument("--workers", type=int, help="parallel repeat workers (default 1)")
    parser.add_argument("--overwrite", action="store_true", default=None,
                        help="replace existing output files")
    parser.add_argument("--epochs", type=int, help="training epochs")
    parser.add_argument("--hidden", type=int, help="hidden channels")
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--weight-decay", type=float)
    parser.add_argument("--batch-size", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbag",
        description="Semantic-trigger backdoor lab for GCN graph classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("inspect", "parse a dataset and print statistics"),
        ("train-clean", "train a clean model and report held-out accuracy"),
        ("attack", "run the full poisoning pipeline (reports, plans, checkpoints)"),
        ("sweep", "run the poisoning pipeline, writing reports and summary only"),
    ]:
        _add_common(sub.add_parser(name, help=help_text))
    return parser


def _resolve_config(args: argparse.Namespace, needs_attack: bool) -> ExperimentConfig:
    file_cfg = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise CliError(f"config file not found: {path}")
        file_cfg = json.loads(path.read_text())

    def pick(flag, key, default=None):
        return flag if flag is not None else file_cfg.get(key, default)

    dataset = pick(args.dataset, "dataset")
    if not dataset:
        raise CliError("no dataset given (use --dataset or the config file)")
    data_root = pick(args.data_root, "data_root")
    if not data_root:
        raise CliError("no data root given (use --data-root or the config file)")

    rates = args.rates
    if rates is not None:
        rates = [float(tok) for tok in rates.split(",") if tok.strip()]
    else:
        rates = file_cfg.get("rates", DEFAULT_RATES.get(dataset))
    target = pick(args.target_label, "target_label", DEFAULT_TARGET_LABELS.get(dataset))
    if needs_attack:
        if rates is None:
            raise CliError(f"no default poisoning rates for {dataset}; pass --rates")
        if not rates:
            raise CliError("no poisoning rates given")
        if target is None:
            raise CliError(f"no default target label for {dataset}; pass --target-label")
    else:
        rates = rates or []
        target = target if target is not None else 0

    train_cfg = TrainConfig(
        hidden_width=pick(args.hidden, "hidden", 32),
        learning_rate=pick(args.learning_rate, "learning_rate", 0.01),
        weight_decay=pick(args.weight_decay, "weight_decay", 5e-4),
        batch_size=pick(args.batch_size, "batch_size", 32),
        max_epochs=pick(args.epochs, "epochs", 100),
        seed=pick(args.seed, "seed", 0),
    )
    return ExperimentConfig(
        dataset=dataset,
        data_root=Path(data_root),
        out_dir=Path(pick(args.out, "out", "results")),
        target_label=int(target),
        rates=[float(r) for r in rates],
        seed=pick(args.seed, "seed", 0),
        repeats=pick(args.repeats, "repeats", 1),
        workers=pick(args.workers, "workers", 1),
        overwrite=bool(pick(args.overwrite, "overwrite", False)),
        train=train_cfg,
    )


def _rate_tag(rate: float) -> str:
    return f"p{rate * 100:g}"


def _check_collisions(paths: list[Path], overwrite: bool):
    existing = [p for p in paths if p.exists()]
    if existing and not overwrite:
        raise CliError(
            f"refusing to overwrite existing output {existing[0]} (pass --overwrite)"
        )


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii")


def cmd_inspect(cfg: ExperimentConfig) -> int:
    dataset, report = parse_dataset(cfg.data_root, cfg.dataset)
    nodes = [g.num_nodes for g in dataset.graphs]
    edges = [len(g.edges) for g in dataset.graphs]
    stats = {
        "report": report,
        "avg_nodes": sum(nodes) / len(nodes),
        "avg_edges": sum(edges) / len(edges),
        "num_node_classes": dataset.num_node_classes,
        "num_graph_classes": dataset.num_graph_classes,
    }
    sys.stdout.write(report_text(stats))
    return 0


def cmd_train_clean(cfg: ExperimentConfig) -> int:
    dataset, _ = parse_dataset(cfg.data_root, cfg.dataset)
    out = cfg.out_dir
    names = [out / f"{cfg.dataset}_clean_s{cfg.seed + r}.model.npz" for r in range(cfg.repeats)]
    names += [out / f"{cfg.dataset}_clean_s{cfg.seed + r}.report.json" for r in range(cfg.repeats)]
    _check_collisions(names, cfg.overwrite)
    for r in range(cfg.repeats):
        seed = cfg.seed + r
        train_cfg = dataclasses.replace(cfg.train, seed=seed)
        train_split, test_split = stratified_split(dataset, TRAIN_FRACTION, seed)
        model = train(train_split, train_cfg)
        acc = accuracy(model, test_split.graphs)
        out.mkdir(parents=True, exist_ok=True)
        save_params(model, out / f"{cfg.dataset}_clean_s{seed}.model.npz")
        _write(out / f"{cfg.dataset}_clean_s{seed}.report.json", report_text({
            "dataset": cfg.dataset,
            "seed": seed,
            "clean_accuracy": acc,
            "train_size": len(train_split),
            "test_size": len(test_split),
        }))
        print(f"{cfg.dataset} seed {seed}: clean accuracy {acc:.4f}")
    return 0


def _run_one_seed(payload) -> SweepResult:
    data_root, name, rates, train_cfg, target, seed = payload
    try:
        dataset, _ = parse_dataset(data_root, name)
        return run_sweep(dataset, rates, train_cfg, target, seed)
    except Exception as exc:
        raise CliError(f"cell {name} rates {rates} seed {seed} failed: {exc}") from exc


def _run_pipeline(cfg: ExperimentConfig, write_models: bool) -> int:
    out = cfg.out_dir
    seeds = [cfg.seed + r for r in range(cfg.repeats)]

    planned: list[Path] = [out / "summary.csv"]
    for seed in seeds:
        planned.append(out / f"{cfg.dataset}_clean_s{seed}.report.json")
        if write_models:
            planned.append(out / f"{cfg.dataset}_clean_s{seed}.model.npz")
        for rate in cfg.rates:
            stem = f"{cfg.dataset}_{_rate_tag(rate)}_s{seed}"
            planned.append(out / f"{stem}.report.json")
            planned.append(out / f"{stem}.plan.json")
            if write_models:
                planned.append(out / f"{stem}.model.npz")
    _check_collisions(planned, cfg.overwrite)

    payloads = [(cfg.data_root, cfg.dataset, cfg.rates, cfg.train, cfg.target_label, s)
                for s in seeds]
    if cfg.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one_seed, payloads))
    else:
        results = [_run_one_seed(p) for p in payloads]

    all_reports = []
    for result in results:
        _write(out / f"{cfg.dataset}_clean_s{result.seed}.report.json", report_text({
            "dataset": cfg.dataset,
            "seed": result.seed,
            "clean_accuracy": result.clean_accuracy,
            "trigger_class": result.trigger_class,
        }))
        if write_models:
            save_params(result.clean_model,
                        out / f"{cfg.dataset}_clean_s{result.seed}.model.npz")
        for cell in result.cells:
            stem = f"{cfg.dataset}_{_rate_tag(cell.report.rate)}_s{result.seed}"
            _write(out / f"{stem}.report.json", report_text(cell.report))
            _write(out / f"{stem}.plan.json", report_text(cell.plan))
            if write_models:
                save_params(cell.model, out / f"{stem}.model.npz")
            all_reports.append(cell.report)
            asr = cell.report.asr_unmodified
            print(f"{cfg.dataset} {_rate_tag(cell.report.rate)} seed {result.seed}: "
                  f"asr={'undefined' if asr is None else f'{asr:.4f}'} "
                  f"benign={cell.report.benign_accuracy:.4f} cad={cell.report.cad:.4f}")
    _write(out / "summary.csv", summary_csv(all_reports))
    return 0


def cmd_attack(cfg: ExperimentConfig) -> int:
    return _run_pipeline(cfg, write_models=True)


def cmd_sweep(cfg: ExperimentConfig) -> int:
    return _run_pipeline(cfg, write_models=False)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "inspect": (cmd_inspect, False),
        "train-clean": (cmd_train_clean, False),
        "attack": (cmd_attack, True),
        "sweep": (cmd_sweep, True),
    }
    try:
        handler, needs_attack = handlers[args.command]
        return handler(_resolve_config(args, needs_attack))
    except (CliError, DatasetNotFoundError, MalformedDatasetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
