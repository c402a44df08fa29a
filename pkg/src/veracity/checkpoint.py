"""Versioned JSON model checkpoints with bit-exact round-trips.

Floats are serialized through Python's shortest-repr JSON encoding, which
reloads to the identical 64-bit value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadCheckpoint
from .fusion import ModalityCombo, NormStats
from .features import Modality
from .nn import ModelSpec, Params

FORMAT_NAME = "veracity-checkpoint"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    spec: ModelSpec
    input_dim: int
    params: Params
    combo: ModalityCombo
    target_len: int
    norm_stats: NormStats | None = None
    train_config: dict | None = None  # effective config echo for audit


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": {
            "kind": ckpt.spec.kind.value,
            "hidden": ckpt.spec.hidden,
            "init_seed": ckpt.spec.init_seed,
        },
        "input_dim": ckpt.input_dim,
        "combo": [m.value for m in ckpt.combo],
        "target_len": ckpt.target_len,
        "norm_stats": ckpt.norm_stats.to_dict() if ckpt.norm_stats else None,
        "train_config": ckpt.train_config,
        "params": {
            key: {"shape": list(value.shape), "data": value.reshape(-1).tolist()}
            for key, value in sorted(ckpt.params.items())
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise BadCheckpoint(f"cannot read checkpoint {path}: {e}") from e
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise BadCheckpoint(f"{path} is not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise BadCheckpoint(f"unsupported checkpoint version {doc.get('version')!r}")
    try:
        params = {
            key: np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
            for key, entry in doc["params"].items()
        }
        spec = ModelSpec(
            kind=doc["spec"]["kind"],
            hidden=doc["spec"]["hidden"],
            init_seed=doc["spec"]["init_seed"],
        )
        return Checkpoint(
            spec=spec,
            input_dim=doc["input_dim"],
            params=params,
            combo=ModalityCombo([Modality(v) for v in doc["combo"]]),
            target_len=doc["target_len"],
            norm_stats=NormStats.from_dict(doc["norm_stats"]) if doc.get("norm_stats") else None,
            train_config=doc.get("train_config"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise BadCheckpoint(f"malformed checkpoint {path}: {e}") from e
