"""The modality x model experiment grid and its report formats.

One train/test split (from the config seed) is shared by every cell so the
modality comparisons stay apples-to-apples.  Failed cells are recorded in
the report instead of aborting the run.
"""

from __future__ import annotations

import json
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .audio import MfccConfig
from .dataset import DatasetManifest, SplitSpec, split_dataset
from .fusion import ModalityCombo, all_combos
from .nn import ModelKind, ModelSpec
from .training import Metrics, TrainConfig, evaluate, train

FORMAT_NAME = "veracity-grid-report"
FORMAT_VERSION = 1

# Text report groups combos by size: singles, pairs, triple.
_SECTION_TITLES = {1: "single modality", 2: "dual modality", 3: "triple modality"}


@dataclass
class GridReport:
    config: dict
    split: dict
    model_kinds: list[ModelKind]
    combos: list[ModalityCombo]
    cells: dict[tuple[ModelKind, str], Metrics] = field(default_factory=dict)
    failed: dict[tuple[ModelKind, str], str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        cells: dict = {kind.value: {} for kind in self.model_kinds}
        for (kind, label), metrics in self.cells.items():
            cells[kind.value][label] = metrics.to_dict()
        failed = {f"{kind.value}/{label}": msg for (kind, label), msg in self.failed.items()}
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config": self.config,
            "split": self.split,
            "models": [k.value for k in self.model_kinds],
            "combos": [c.label for c in self.combos],
            "cells": cells,
            "failed_cells": failed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def render_text(self) -> str:
        """Three-section accuracy table (percentages, two decimals)."""
        lines = []
        for size in (1, 2, 3):
            section = [c for c in self.combos if len(c) == size]
            if not section:
                continue
            lines.append(f"== {_SECTION_TITLES[size]} ==")
            header = ["model"] + [c.label for c in section]
            rows = [header]
            for kind in self.model_kinds:
                row = [kind.value]
                for combo in section:
                    key = (kind, combo.label)
                    if key in self.cells:
                        row.append(f"{100.0 * self.cells[key].accuracy:.2f}%")
                    else:
                        row.append("FAILED")
                rows.append(row)
            widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
            for r in rows:
                lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
            lines.append("")
        return "\n".join(lines)


def _run_cell(args) -> tuple[tuple[str, str], dict | None, str | None]:
    """Train and evaluate one (model kind, combo) cell; pickle-friendly."""
    kind_value, combo_spec, train_samples, test_samples, cfg, hidden, mfcc = args
    try:
        combo = ModalityCombo.parse(combo_spec)
        spec = ModelSpec(kind=ModelKind(kind_value), hidden=hidden, init_seed=cfg.seed)
        ckpt, _ = train(spec, combo, train_samples, cfg, mfcc)
        metrics = evaluate(ckpt, test_samples, mfcc)
        return (kind_value, combo.label), metrics.to_dict(), None
    except Exception:
        combo_label = ModalityCombo.parse(combo_spec).label
        return (kind_value, combo_label), None, traceback.format_exc(limit=3)


def run_grid(
    manifest: DatasetManifest,
    model_kinds: list[ModelKind] | None,
    combos: list[ModalityCombo] | None,
    cfg: TrainConfig,
    hidden: int = 128,
    mfcc_config: MfccConfig | None = None,
    jobs: int = 1,
) -> GridReport:
    model_kinds = model_kinds or list(ModelKind)
    combos = combos or all_combos()
    if not model_kinds or not combos:
        raise ValueError("need at least one model kind and one combo")

    split_spec = SplitSpec(train_fraction=cfg.train_fraction, seed=cfg.seed)
    train_samples, test_samples = split_dataset(manifest, split_spec)

    report = GridReport(
        config={**cfg.to_dict(), "hidden": hidden},
        split={
            "seed": cfg.seed,
            "train_fraction": cfg.train_fraction,
            "n_train": len(train_samples),
            "n_test": len(test_samples),
            "train_ids": [s.id for s in train_samples],
            "test_ids": [s.id for s in test_samples],
        },
        model_kinds=model_kinds,
        combos=combos,
    )

    tasks = [
        (kind.value, ",".join(m.value[0] for m in combo), train_samples, test_samples,
         cfg, hidden, mfcc_config)
        for kind in model_kinds
        for combo in combos
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    for (kind_value, label), metrics_dict, error in results:
        key = (ModelKind(kind_value), label)
        if error is None:
            report.cells[key] = Metrics(
                tp=metrics_dict["tp"],
                fp=metrics_dict["fp"],
                fn=metrics_dict["fn"],
                tn=metrics_dict["tn"],
            )
        else:
            report.failed[key] = error
    return report


def write_report(path: str | Path, report: GridReport) -> None:
    """JSON report plus a rendered text table next to it (.txt)."""
    path = Path(path)
    path.write_text(report.to_json(), encoding="utf-8")
    path.with_suffix(path.suffix + ".txt").write_text(report.render_text(), encoding="utf-8")
