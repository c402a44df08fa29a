"""Training loop (clamped BCE + Adam), metrics, and normalization stats.

All randomness flows from named seeds; identical (data, spec, config) runs
produce bit-identical histories and checkpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .checkpoint import Checkpoint
from .dataset import Label, SampleRecord
from .errors import EmptyTrainingSet, MissingModality, NonFiniteLoss
from .features import FeatureSequence, Modality
from .fusion import DEFAULT_TARGET_LEN, ModalityCombo, NormStats, fuse
from .loading import load_features
from .audio import MfccConfig
from .nn import ModelSpec, Params, backward_batch, forward_batch, init_params

PROB_CLAMP = 1e-7


@dataclass
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 1e-4
    batch_size: int = 16
    seed: int = 0
    target_len: int = DEFAULT_TARGET_LEN
    train_fraction: float = 0.8
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.target_len < 1:
            raise ValueError("target_len must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0,1)")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "target_len": self.target_len,
            "train_fraction": self.train_fraction,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps,
        }


@dataclass
class Metrics:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n if self.n else 0.0

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "n": self.n,
        }


@dataclass
class Prediction:
    sample_id: str
    probability: float
    predicted: Label
    label: Label


@dataclass
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def bce_loss(p: float, y: float) -> tuple[float, float]:
    """Clamped binary cross-entropy and its derivative w.r.t. p.

    y is 0 for truthful, 1 for deceptive; p is clamped to
    [PROB_CLAMP, 1 - PROB_CLAMP] before the logs.
    """
    p = min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP)
    loss = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    dloss_dp = -y / p + (1.0 - y) / (1.0 - p)
    return float(loss), float(dloss_dp)


def _bce_vector(p: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    loss = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    dloss = -y / p + (1.0 - y) / (1.0 - p)
    return loss, dloss


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0


def adam_step(
    params: Params, grads: Params, state: AdamState, cfg: TrainConfig
) -> tuple[Params, AdamState]:
    """One Adam update with bias correction; params and state updated in place."""
    if state.step == 0:
        for key, value in params.items():
            state.m[key] = np.zeros_like(value)
            state.v[key] = np.zeros_like(value)
    state.step += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    for key, g in grads.items():
        if g.shape != params[key].shape:
            raise ValueError(f"gradient shape mismatch for {key!r}")
        state.m[key] = b1 * state.m[key] + (1.0 - b1) * g
        state.v[key] = b2 * state.v[key] + (1.0 - b2) * g * g
        m_hat = state.m[key] / (1.0 - b1**state.step)
        v_hat = state.v[key] / (1.0 - b2**state.step)
        params[key] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return params, state


def compute_norm_stats(train_features: dict[Modality, list[FeatureSequence]]) -> NormStats:
    """Per-dimension mean/std pooled over all frames of all training samples."""
    return NormStats.from_sequences(train_features)


def _prepare_inputs(
    samples: Sequence[SampleRecord],
    combo: ModalityCombo,
    target_len: int,
    stats: NormStats | None,
    mfcc_config: MfccConfig | None = None,
) -> tuple[np.ndarray, np.ndarray, NormStats]:
    """Load, fuse, and stack features; computes stats when not supplied."""
    per_sample: list[dict[Modality, FeatureSequence]] = []
    for record in samples:
        try:
            per_sample.append(load_features(record, combo, mfcc_config))
        except FileNotFoundError as e:
            raise MissingModality(f"sample {record.id!r}: {e}") from e
    if stats is None:
        pooled = {m: [feats[m] for feats in per_sample] for m in combo}
        stats = compute_norm_stats(pooled)
    fused = [
        fuse(list(feats.values()), combo, target_len=target_len, stats=stats)
        for feats in per_sample
    ]
    x = np.stack([f.frames for f in fused])
    y = np.array([record.label.target for record in samples])
    return x, y, stats


def train_on_arrays(
    spec: ModelSpec, x: np.ndarray, y: np.ndarray, cfg: TrainConfig
) -> tuple[Params, list[EpochStats]]:
    """Mini-batch Adam over shuffled epochs on prepared B x T x D inputs."""
    n = x.shape[0]
    params = init_params(spec, x.shape[2])
    state = AdamState()
    rng = np.random.default_rng(cfg.seed)
    history: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        losses = np.empty(n)
        correct = 0
        for start in range(0, n, cfg.batch_size):
            batch_idx = order[start : start + cfg.batch_size]
            probs, caches = forward_batch(spec, params, x[batch_idx])
            loss_vec, dloss = _bce_vector(probs, y[batch_idx])
            if not np.all(np.isfinite(loss_vec)):
                raise NonFiniteLoss(
                    f"non-finite loss at epoch {epoch}, batch {start // cfg.batch_size}",
                    epoch=epoch,
                    batch=start // cfg.batch_size,
                )
            losses[start : start + len(batch_idx)] = loss_vec
            correct += int(np.sum((probs >= 0.5) == (y[batch_idx] == 1.0)))
            grads = backward_batch(spec, params, caches, dloss / len(batch_idx))
            adam_step(params, grads, state, cfg)
        history.append(
            EpochStats(epoch=epoch, loss=float(losses.mean()), accuracy=correct / n)
        )
    return params, history


def train(
    spec: ModelSpec,
    combo: ModalityCombo,
    train_samples: Sequence[SampleRecord],
    cfg: TrainConfig,
    mfcc_config: MfccConfig | None = None,
) -> tuple[Checkpoint, list[EpochStats]]:
    """Train a classifier for one modality combination on manifest records."""
    if not train_samples:
        raise EmptyTrainingSet("no training samples")
    x, y, stats = _prepare_inputs(train_samples, combo, cfg.target_len, None, mfcc_config)
    params, history = train_on_arrays(spec, x, y, cfg)
    ckpt = Checkpoint(
        spec=spec,
        input_dim=x.shape[2],
        params=params,
        combo=combo,
        target_len=cfg.target_len,
        norm_stats=stats,
        train_config=cfg.to_dict(),
    )
    return ckpt, history


def predict(
    ckpt: Checkpoint,
    samples: Sequence[SampleRecord],
    mfcc_config: MfccConfig | None = None,
) -> list[Prediction]:
    """Per-sample probabilities and thresholded labels (ties go deceptive)."""
    x, _, _ = _prepare_inputs(samples, ckpt.combo, ckpt.target_len, ckpt.norm_stats, mfcc_config)
    if x.shape[2] != ckpt.input_dim:
        raise MissingModality(
            f"fused width {x.shape[2]} does not match checkpoint input width {ckpt.input_dim}"
        )
    probs, _ = forward_batch(ckpt.spec, ckpt.params, x)
    out = []
    for record, p in zip(samples, probs):
        predicted = Label.DECEPTIVE if p >= 0.5 else Label.TRUTHFUL
        out.append(Prediction(record.id, float(p), predicted, record.label))
    return out


def metrics_from_predictions(predictions: Sequence[Prediction]) -> Metrics:
    """Confusion-matrix counts with deceptive as the positive class."""
    tp = fp = fn = tn = 0
    for pred in predictions:
        if pred.predicted is Label.DECEPTIVE:
            if pred.label is Label.DECEPTIVE:
                tp += 1
            else:
                fp += 1
        else:
            if pred.label is Label.DECEPTIVE:
                fn += 1
            else:
                tn += 1
    return Metrics(tp=tp, fp=fp, fn=fn, tn=tn)


def evaluate(
    ckpt: Checkpoint,
    samples: Sequence[SampleRecord],
    mfcc_config: MfccConfig | None = None,
) -> Metrics:
    return metrics_from_predictions(predict(ckpt, samples, mfcc_config))


def write_predictions_csv(path, predictions: Sequence[Prediction]) -> None:
    """Cross-check dump: sample_id,probability,predicted,label."""
    from pathlib import Path

    lines = ["sample_id,probability,predicted,label"]
    for p in predictions:
        lines.append(f"{p.sample_id},{p.probability:.9g},{p.predicted.value},{p.label.value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
