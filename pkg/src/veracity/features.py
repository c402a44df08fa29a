"""Shared feature-sequence types used by every modality."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Modality(Enum):
    """The three input channels, in canonical concatenation order."""

    VISUAL = "visual"
    AUDIO = "audio"
    TEXT = "text"

    @property
    def order(self) -> int:
        return _CANONICAL_ORDER[self]

    @property
    def letter(self) -> str:
        return _LETTER[self]


_CANONICAL_ORDER = {Modality.VISUAL: 0, Modality.AUDIO: 1, Modality.TEXT: 2}
_LETTER = {Modality.VISUAL: "V", Modality.AUDIO: "A", Modality.TEXT: "T"}


@dataclass
class FeatureSequence:
    """A time-ordered T x D matrix of feature vectors for one sample.

    frame_rate is in frames per second; 0 means the rows are ordered but
    carry no wall-clock rate (token sequences).
    """

    modality: Modality
    frames: np.ndarray
    frame_rate: float

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 2:
            raise ValueError(f"frames must be 2-D, got shape {self.frames.shape}")
        t, d = self.frames.shape
        if t < 1 or d < 1:
            raise ValueError(f"frames must be at least 1x1, got {t}x{d}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("frames contain non-finite values")
        if self.frame_rate < 0:
            raise ValueError("frame_rate must be >= 0")

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]
