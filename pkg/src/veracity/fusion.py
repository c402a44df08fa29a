"""Temporal alignment and early fusion of modality feature sequences.

Every sequence is linearly resampled to a common length, z-normalized per
modality with training-split statistics, and concatenated along the feature
axis in canonical order (visual, audio, text).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicateModality, EmptyTrainingSet, MissingModality
from .features import FeatureSequence, Modality

DEFAULT_TARGET_LEN = 64
NORM_EPS = 1e-8

ALL_COMBOS_SPEC = ("v", "t", "a", "a,t", "v,t", "v,a", "v,a,t")

_TOKEN_TO_MODALITY = {"v": Modality.VISUAL, "a": Modality.AUDIO, "t": Modality.TEXT}


@dataclass(frozen=True)
class ModalityCombo:
    """A nonempty subset of modalities, iterated in canonical order."""

    modalities: tuple[Modality, ...]

    def __init__(self, modalities) -> None:
        mods = set(modalities)
        if not mods:
            raise ValueError("a modality combination cannot be empty")
        ordered = tuple(sorted(mods, key=lambda m: m.order))
        object.__setattr__(self, "modalities", ordered)

    @classmethod
    def parse(cls, text: str) -> "ModalityCombo":
        """Parse tokens like 'v,a,t' (order-insensitive, case-insensitive)."""
        tokens = [t.strip().lower() for t in text.split(",") if t.strip()]
        if not tokens:
            raise ValueError("empty modality combination")
        mods = []
        for t in tokens:
            if t not in _TOKEN_TO_MODALITY:
                raise ValueError(f"unknown modality token {t!r} (expected v, a, or t)")
            mods.append(_TOKEN_TO_MODALITY[t])
        if len(set(mods)) != len(mods):
            raise ValueError(f"duplicate modality token in {text!r}")
        return cls(mods)

    @property
    def label(self) -> str:
        """Report label, e.g. 'V', 'A+T', 'V+A+T'."""
        return "+".join(m.letter for m in self.modalities)

    def __contains__(self, modality: Modality) -> bool:
        return modality in self.modalities

    def __iter__(self):
        return iter(self.modalities)

    def __len__(self) -> int:
        return len(self.modalities)


def all_combos() -> list[ModalityCombo]:
    """The seven combinations in report order: singles, pairs, triple."""
    return [ModalityCombo.parse(s) for s in ALL_COMBOS_SPEC]


@dataclass
class NormStats:
    """Per-modality feature mean/std vectors, computed on the training split."""

    mean: dict[Modality, np.ndarray] = field(default_factory=dict)
    std: dict[Modality, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_sequences(cls, per_modality: dict[Modality, list[FeatureSequence]]) -> "NormStats":
        """Per-dimension mean/std pooled over all frames of all sequences."""
        stats = cls()
        for modality, seqs in per_modality.items():
            if not seqs:
                raise EmptyTrainingSet(
                    f"no training sequences for modality {modality.value!r}"
                )
            pooled = np.concatenate([s.frames for s in seqs], axis=0)
            stats.mean[modality] = pooled.mean(axis=0)
            stats.std[modality] = pooled.std(axis=0)  # population std; epsilon added in apply
        return stats

    def apply(self, seq_frames: np.ndarray, modality: Modality) -> np.ndarray:
        if modality not in self.mean:
            return seq_frames
        return (seq_frames - self.mean[modality]) / (self.std[modality] + NORM_EPS)

    def to_dict(self) -> dict:
        return {
            m.value: {"mean": self.mean[m].tolist(), "std": self.std[m].tolist()}
            for m in self.mean
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NormStats":
        stats = cls()
        for key, entry in doc.items():
            m = Modality(key)
            stats.mean[m] = np.asarray(entry["mean"], dtype=np.float64)
            stats.std[m] = np.asarray(entry["std"], dtype=np.float64)
        return stats

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NormStats":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class FusedInput:
    frames: np.ndarray  # target_len x total feature dim
    combo: ModalityCombo


def resample_sequence(seq: FeatureSequence, target_len: int) -> FeatureSequence:
    """Linear interpolation to target_len frames along the time axis.

    target_len 1 takes the temporal mean; a single input frame is repeated.
    Matching lengths return the input unchanged.
    """
    if target_len < 1:
        raise ValueError(f"target_len must be >= 1, got {target_len}")
    t = seq.length
    if t == target_len:
        frames = seq.frames.copy()
    elif target_len == 1:
        frames = seq.frames.mean(axis=0, keepdims=True)
    elif t == 1:
        frames = np.repeat(seq.frames, target_len, axis=0)
    else:
        positions = np.arange(target_len) * (t - 1) / (target_len - 1)
        lower = np.floor(positions).astype(int)
        upper = np.minimum(lower + 1, t - 1)
        weight = (positions - lower)[:, None]
        frames = (1.0 - weight) * seq.frames[lower] + weight * seq.frames[upper]
    return FeatureSequence(modality=seq.modality, frames=frames, frame_rate=0.0)


def fuse(
    seqs: list[FeatureSequence],
    combo: ModalityCombo,
    target_len: int = DEFAULT_TARGET_LEN,
    stats: NormStats | None = None,
) -> FusedInput:
    """Resample, normalize, and concatenate one sequence per combo modality.

    Sequences for modalities outside the combo are ignored; stats=None means
    identity normalization.
    """
    by_modality: dict[Modality, FeatureSequence] = {}
    for seq in seqs:
        if seq.modality in by_modality:
            raise DuplicateModality(f"two sequences for modality {seq.modality.value!r}")
        by_modality[seq.modality] = seq

    stats = stats or NormStats()
    blocks = []
    for modality in combo:
        if modality not in by_modality:
            raise MissingModality(f"combo {combo.label} needs modality {modality.value!r}")
        resampled = resample_sequence(by_modality[modality], target_len)
        blocks.append(stats.apply(resampled.frames, modality))
    return FusedInput(frames=np.concatenate(blocks, axis=1), combo=combo)
