"""Train every head on one dataset and compare them."""

from __future__ import annotations

from dataclasses import dataclass

from .. import metrics
from .config import HEADS, RunConfig
from .data import SyntheticDataset, generate_synthetic
from .model import ToyModel
from .train import EpochRecord, EvalResult, evaluate, run


@dataclass
class HeadRun:
    head: str
    model: ToyModel
    log: list[EpochRecord]
    evaluation: EvalResult


def run_benchmark(config: RunConfig, heads=HEADS, dataset: SyntheticDataset | None = None,
                  progress=None) -> tuple[dict[str, HeadRun], SyntheticDataset]:
    """Train each head from the same config (only ``model.head`` changes) and
    evaluate on the validation split."""
    if dataset is None:
        dataset = generate_synthetic(config.dataset)
    out = {}
    for head in heads:
        cfg = config.with_head(head)
        cb_progress = None if progress is None else (lambda rec, h=head: progress(h, rec))
        model, log, _ = run(cfg, dataset, progress=cb_progress)
        out[head] = HeadRun(head, model, log, evaluate(model, dataset, cfg.eval_mode))
    return out, dataset


def compare(a: EvalResult, b: EvalResult):
    """Per-class DSC difference ``a - b`` with mean truth volume, smallest first."""
    return metrics.dsc_difference(a.size_table, b.size_table)
