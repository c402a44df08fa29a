"""Per-frame 68-point facial landmark ingestion and normalization.

Landmarks arrive as CSV files produced offline (one row per video frame).
Normalization removes translation (centroid) and scale (inter-ocular
distance); rotation is deliberately left alone since head pose may carry
signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateFace, MalformedLandmarks
from .features import FeatureSequence, Modality

N_POINTS = 68
# 1-based eye-region indices of the 68-point convention, as 0-based slices
RIGHT_EYE = slice(36, 42)  # points 37-42
LEFT_EYE = slice(42, 48)  # points 43-48

_DEGENERATE_EPS = 1e-9


@dataclass
class LandmarkFrame:
    points: np.ndarray  # 68 x 2 pixel coordinates

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.shape != (N_POINTS, 2):
            raise ValueError(f"expected {N_POINTS}x2 points, got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("landmark coordinates must be finite")


@dataclass
class LandmarkSequence:
    frames: list[LandmarkFrame]
    fps: float

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValueError("landmark sequence needs at least one frame")
        if self.fps <= 0:
            raise ValueError("fps must be > 0")


def parse_landmarks(path: str | Path) -> LandmarkSequence:
    """Parse a landmark CSV (format: fps comment, column header, data rows)."""
    path = Path(path)
    fps: float | None = None
    header_seen = False
    rows: list[np.ndarray] = []
    last_index = -1

    expected_header = "frame," + ",".join(f"x{i},y{i}" for i in range(1, N_POINTS + 1))
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("fps="):
                    try:
                        fps = float(body[4:])
                    except ValueError as e:
                        raise MalformedLandmarks(f"line {lineno}: bad fps value") from e
                continue  # other comment lines are sidecar metadata
            if not header_seen:
                if line != expected_header:
                    raise MalformedLandmarks(f"line {lineno}: unexpected column header")
                header_seen = True
                continue
            cells = line.split(",")
            if len(cells) != 1 + 2 * N_POINTS:
                raise MalformedLandmarks(
                    f"line {lineno}: expected {1 + 2 * N_POINTS} columns, got {len(cells)}"
                )
            try:
                index = int(cells[0])
                values = np.array([float(c) for c in cells[1:]], dtype=np.float64)
            except ValueError as e:
                raise MalformedLandmarks(f"line {lineno}: non-numeric cell") from e
            if index <= last_index:
                raise MalformedLandmarks(
                    f"line {lineno}: frame index {index} not strictly increasing"
                )
            if not np.all(np.isfinite(values)):
                raise MalformedLandmarks(f"line {lineno}: non-finite coordinate")
            last_index = index
            rows.append(values.reshape(N_POINTS, 2))

    if fps is None:
        raise MalformedLandmarks("missing '# fps=<real>' header line")
    if fps <= 0:
        raise MalformedLandmarks(f"fps must be > 0, got {fps}")
    if not header_seen:
        raise MalformedLandmarks("missing column header row")
    if not rows:
        raise MalformedLandmarks("no data rows")
    return LandmarkSequence(frames=[LandmarkFrame(points=r) for r in rows], fps=fps)


def write_landmarks(path: str | Path, seq: LandmarkSequence) -> None:
    """Serialize in the canonical CSV format (9 significant digits)."""
    lines = [f"# fps={seq.fps:.9g}"]
    lines.append("frame," + ",".join(f"x{i},y{i}" for i in range(1, N_POINTS + 1)))
    for i, frame in enumerate(seq.frames):
        coords = ",".join(f"{v:.9g}" for v in frame.points.reshape(-1))
        lines.append(f"{i},{coords}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def inter_ocular_distance(frame: LandmarkFrame) -> float:
    """Distance between the mean of each eye-region point set."""
    right = frame.points[RIGHT_EYE].mean(axis=0)
    left = frame.points[LEFT_EYE].mean(axis=0)
    return float(np.linalg.norm(left - right))


def normalize_frame(frame: LandmarkFrame) -> LandmarkFrame:
    """Center on the centroid and scale by the inter-ocular distance."""
    distance = inter_ocular_distance(frame)
    if distance <= _DEGENERATE_EPS:
        raise DegenerateFace(f"inter-ocular distance {distance:g} is degenerate")
    centroid = frame.points.mean(axis=0)
    return LandmarkFrame(points=(frame.points - centroid) / distance)


def landmarks_to_features(seq: LandmarkSequence) -> FeatureSequence:
    """Per frame: (x_1..x_68, y_1..y_68) of normalized coordinates."""
    rows = np.empty((len(seq.frames), 2 * N_POINTS))
    for i, frame in enumerate(seq.frames):
        try:
            normalized = normalize_frame(frame)
        except DegenerateFace as e:
            raise DegenerateFace(f"frame {i}: {e}", frame=i) from e
        rows[i, :N_POINTS] = normalized.points[:, 0]
        rows[i, N_POINTS:] = normalized.points[:, 1]
    return FeatureSequence(modality=Modality.VISUAL, frames=rows, frame_rate=seq.fps)
