"""Deterministic structured-text serialization for report objects.

Reports (EvalReport, PoisonPlan, ParseReport) are emitted as JSON with sorted
keys and a trailing newline, so identical runs produce byte-identical files.
The flat summary table is CSV with one row per experiment cell.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json

import numpy as np

from .evaluate import EvalReport


def to_jsonable(obj):
    """Recursively convert dataclasses / numpy scalars / int-keyed dicts."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def report_text(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_csv(reports: list[EvalReport]) -> str:
    """One row per cell; injected-ASR columns are named by injection count."""
    counts = sorted({c for r in reports if r.asr_injected for c in r.asr_injected})
    header = ["dataset", "p", "seed", "clean_accuracy", "benign_accuracy", "cad",
              "cad_clamped", "asr_unmodified", "trigger_class", "k", "num_p",
              "num_poisoned"] + [f"asr_injected_{c}" for c in counts]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in reports:
        row = [r.dataset, _fmt(r.rate), r.seed, _fmt(r.clean_accuracy),
               _fmt(r.benign_accuracy), _fmt(r.cad), _fmt(r.cad_clamped),
               _fmt(r.asr_unmodified), r.trigger_class, _fmt(r.k), r.num_p,
               r.num_poisoned]
        for c in counts:
            row.append(_fmt(r.asr_injected.get(c)) if r.asr_injected else "")
        writer.writerow(row)
    return buf.getvalue()
