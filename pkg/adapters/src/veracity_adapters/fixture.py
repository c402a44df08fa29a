"""Deterministic raw-media fixture for exercising the adapters end to end.

Renders a 10-second clip of a schematic frontal face (same canonical
geometry the tracker backend fits, drifting and rotating frame to frame),
a 44.1 kHz stereo source WAV, and a short transcript. Everything is a pure
function of the seed so tests can regenerate instead of checking in media.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import write_wav_int16
from .video import write_clip

_FACE = (0.0, 10.0, 92.0, 112.0)  # cx, cy, rx, ry in template coordinates
_EYES = ((-30.0, -25.0, 15.0, 9.0), (30.0, -25.0, 15.0, 9.0))
_MOUTH = (0.0, 50.0, 28.0, 14.0)
_BG, _SKIN, _CAVITY = 30, 210, 45

TRANSCRIPT_TEXT = (
    "I was at the warehouse the whole evening and never saw the shipment "
    "leave the dock. The manifest they showed me listed twelve crates, "
    "but I only counted nine when we locked up. Nobody else had keys "
    "that night, as far as I know.\n"
)


def _ellipse_mask(lx: np.ndarray, ly: np.ndarray, spec: tuple) -> np.ndarray:
    cx, cy, rx, ry = spec
    return ((lx - cx) / rx) ** 2 + ((ly - cy) / ry) ** 2 <= 1.0


def render_face_frame(
    size: tuple[int, int],
    center: tuple[float, float],
    scale: float,
    angle: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw the schematic face under a similarity pose, light sensor noise."""
    h, w = size
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx, dy = xs - center[0], ys - center[1]
    # Inverse pose: pixel grid back into template coordinates.
    c, s = np.cos(-angle), np.sin(-angle)
    lx = (c * dx - s * dy) / scale
    ly = (s * dx + c * dy) / scale
    img = np.full(size, float(_BG))
    img[_ellipse_mask(lx, ly, _FACE)] = _SKIN
    for eye in _EYES:
        img[_ellipse_mask(lx, ly, eye)] = _CAVITY
    img[_ellipse_mask(lx, ly, _MOUTH)] = _CAVITY
    img += rng.normal(0.0, 2.0, size)
    return np.clip(img, 0, 255).astype(np.uint8)


def render_face_clip(
    n_frames: int,
    size: tuple[int, int] = (240, 320),
    seed: int = 0,
    occluded: frozenset[int] | set[int] = frozenset(),
) -> np.ndarray:
    """Face drifting, breathing, and rotating slightly; listed frames are
    occluded with a featureless gray card."""
    rng = np.random.default_rng(seed)
    h, w = size
    frames = np.empty((n_frames, h, w), dtype=np.uint8)
    for t in range(n_frames):
        if t in occluded:
            frames[t] = 100
            continue
        center = (
            w / 2 + 12.0 * np.sin(2 * np.pi * t / 90.0) + rng.normal(0.0, 0.8),
            h / 2 + 8.0 * np.cos(2 * np.pi * t / 110.0) + rng.normal(0.0, 0.8),
        )
        scale = 0.72 * (1.0 + 0.05 * np.sin(2 * np.pi * t / 200.0))
        angle = 0.06 * np.sin(2 * np.pi * t / 150.0)
        frames[t] = render_face_frame(size, center, scale, angle, rng)
    return frames


def render_noise_clip(
    n_frames: int, size: tuple[int, int] = (240, 320), seed: int = 0
) -> np.ndarray:
    """Dim structureless frames: nothing for a face detector to find."""
    rng = np.random.default_rng(seed)
    frames = rng.normal(60.0, 15.0, (n_frames, *size))
    return np.clip(frames, 0, 110).astype(np.uint8)


def _speech_like_stereo(duration_s: float, rate: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(int(round(duration_s * rate))) / rate
    env = (0.5 + 0.5 * np.sin(2 * np.pi * 0.8 * t)) ** 2
    left = 0.3 * env * np.sin(2 * np.pi * 220.0 * t)
    right = 0.3 * env * np.sin(2 * np.pi * 330.0 * t)
    noise = rng.normal(0.0, 0.01, (t.shape[0], 2))
    return np.stack([left, right], axis=1) + noise


@dataclass(frozen=True)
class FixturePaths:
    clip: Path
    audio: Path
    transcript: Path


def _clip_suffix() -> str:
    try:
        import cv2  # noqa: F401

        return ".avi"
    except ImportError:
        return ".npz"


def make_fixture(
    out_dir: str | Path,
    seed: int = 0,
    duration_s: float = 10.0,
    fps: float = 30.0,
) -> FixturePaths:
    """Write clip + source WAV + transcript into out_dir and return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed + 1)
    n_frames = int(round(duration_s * fps))
    clip = write_clip(out / f"clip{_clip_suffix()}", render_face_clip(n_frames, seed=seed), fps)
    audio = out / "source.wav"
    write_wav_int16(audio, _speech_like_stereo(duration_s, 44100, rng), 44100)
    transcript = out / "transcript.txt"
    transcript.write_text(TRANSCRIPT_TEXT, encoding="utf-8")
    return FixturePaths(clip=clip, audio=audio, transcript=transcript)
