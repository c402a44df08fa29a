"""Decode clips into grayscale frame stacks.

Two container kinds are accepted: real video files (anything OpenCV can
open, requires opencv-python-headless) and .npz frame archives with keys
``frames`` (n, h, w[, 3]) uint8 and ``fps`` (scalar), used where no video
codec is available.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import UndecodableVideo

DEFAULT_FPS = 30.0


@dataclass(frozen=True)
class FrameStack:
    """A decoded clip: grayscale frames plus the container's frame rate."""

    frames: np.ndarray  # (n, h, w) uint8
    fps: float

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


def _to_gray(frames: np.ndarray) -> np.ndarray:
    if frames.ndim == 4:
        return frames.mean(axis=3).astype(np.uint8)
    return frames.astype(np.uint8)


def _read_npz(path: Path) -> FrameStack:
    try:
        with np.load(path) as z:
            frames = np.asarray(z["frames"])
            fps = float(z["fps"]) if "fps" in z else DEFAULT_FPS
    except Exception as e:
        raise UndecodableVideo(f"{path}: {e}") from e
    if frames.ndim not in (3, 4) or frames.shape[0] == 0:
        raise UndecodableVideo(f"{path}: expected (frames, h, w[, 3]) array")
    return FrameStack(frames=_to_gray(frames), fps=fps)


def _read_video(path: Path) -> FrameStack:
    try:
        import cv2
    except ImportError as e:
        raise UndecodableVideo(
            f"{path}: reading video containers requires opencv-python-headless"
        ) from e
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise UndecodableVideo(f"{path}: container not readable")
    fps = cap.get(cv2.CAP_PROP_FPS) or DEFAULT_FPS
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        if frame.ndim == 3:
            frame = cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY)
        frames.append(frame)
    cap.release()
    if not frames:
        raise UndecodableVideo(f"{path}: no frames decoded")
    return FrameStack(frames=np.stack(frames).astype(np.uint8), fps=float(fps))


def read_frames(path: str | Path) -> FrameStack:
    """Decode a clip to grayscale frames, dispatching on the container."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(p)
    if p.suffix.lower() == ".npz":
        return _read_npz(p)
    return _read_video(p)


def write_clip(path: str | Path, frames: np.ndarray, fps: float) -> Path:
    """Encode grayscale frames as MJPG video (.avi) or an .npz archive."""
    p = Path(path)
    frames = np.asarray(frames, dtype=np.uint8)
    if p.suffix.lower() == ".npz":
        np.savez_compressed(p, frames=frames, fps=np.float64(fps))
        return p
    import cv2

    h, w = frames.shape[1:3]
    writer = cv2.VideoWriter(str(p), cv2.VideoWriter_fourcc(*"MJPG"), fps, (w, h), False)
    if not writer.isOpened():
        raise UndecodableVideo(f"{p}: video encoder unavailable, use a .npz path")
    for frame in frames:
        writer.write(frame)
    writer.release()
    return p
