"""Error taxonomy for the extraction adapters.

All adapter failures derive from AdapterError so the CLI can map them to a
single data-error exit code; usage problems are raised by argparse instead.
"""

from __future__ import annotations


class AdapterError(Exception):
    """Base class for adapter failures caused by input data."""


class UndecodableAudio(AdapterError):
    """Source audio is missing, truncated, or in an unsupported encoding."""


class UndecodableVideo(AdapterError):
    """Clip is missing, unreadable, or in an unsupported container."""


class EmptyTranscript(AdapterError):
    """Transcript contains no tokens."""


class NoFaceFound(AdapterError):
    """Face detection rate fell below the acceptance threshold.

    Carries enough detail to write a machine-readable rejection report.
    """

    def __init__(self, clip: str, n_frames: int, n_detected: int, min_rate: float):
        self.clip = clip
        self.n_frames = n_frames
        self.n_detected = n_detected
        self.min_rate = min_rate
        rate = n_detected / n_frames if n_frames else 0.0
        super().__init__(
            f"face detected in {n_detected}/{n_frames} frames "
            f"({rate:.1%}), need >= {min_rate:.0%}"
        )

    @property
    def rate(self) -> float:
        return self.n_detected / self.n_frames if self.n_frames else 0.0
