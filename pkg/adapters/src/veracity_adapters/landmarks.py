"""Per-frame 68-point facial landmark extraction.

Backends are pluggable. The ``dlib`` backend wraps the pretrained
dlib frontal-face detector plus its 68-point shape predictor and is picked
automatically when the library and its model file are available. The
``tracker`` backend is a dependency-free classical detector: it thresholds
the bright face region, locates the eye and mouth cavities inside it, and
maps a canonical 68-point template through a least-squares similarity fit
on those three anchors. Both produce the same CSV contract: one row per
frame, 1 + 136 columns, fps in a comment header.

Frames where detection fails are filled from the nearest detected frame
and the fill is logged plus recorded as comment lines in the output.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import AdapterError, NoFaceFound
from .video import read_frames

log = logging.getLogger("veracity_adapters")

TOOL_VERSION = "veracity-adapters/0.1.0"
N_POINTS = 68

_JAW_RX, _JAW_RY = 80.0, 95.0
_EYE_CENTERS = ((-30.0, -25.0), (30.0, -25.0))
_EYE_RX, _EYE_RY = 12.0, 6.0
_MOUTH_CENTER = (0.0, 50.0)


def template_face() -> np.ndarray:
    """Canonical 68-point face, origin at face center, y down, in the
    standard ordering: jaw, brows, nose, eyes, outer lip, inner lip."""
    pts = np.zeros((N_POINTS, 2))
    t = np.linspace(np.pi, 0.0, 17)
    pts[0:17, 0] = _JAW_RX * np.cos(t)
    pts[0:17, 1] = _JAW_RY * np.sin(t)
    brow_x = np.linspace(-52.0, -18.0, 5)
    brow_arc = np.array([0.0, 4.0, 6.0, 4.0, 0.0])
    pts[17:22, 0] = brow_x
    pts[17:22, 1] = -45.0 - brow_arc
    pts[22:27, 0] = -brow_x[::-1]
    pts[22:27, 1] = -45.0 - brow_arc
    pts[27:31, 0] = 0.0
    pts[27:31, 1] = np.linspace(-30.0, 5.0, 4)
    pts[31:36, 0] = np.linspace(-14.0, 14.0, 5)
    pts[31:36, 1] = np.array([16.0, 18.0, 20.0, 18.0, 16.0])
    eye_t = np.deg2rad(np.array([180.0, 120.0, 60.0, 0.0, -60.0, -120.0]))
    for k, (cx, cy) in enumerate(_EYE_CENTERS):
        lo = 36 + 6 * k
        pts[lo : lo + 6, 0] = cx + _EYE_RX * np.cos(eye_t)
        pts[lo : lo + 6, 1] = cy - _EYE_RY * np.sin(eye_t)
    outer_t = np.linspace(np.pi, -np.pi, 13)[:-1]
    pts[48:60, 0] = _MOUTH_CENTER[0] + 25.0 * np.cos(outer_t)
    pts[48:60, 1] = _MOUTH_CENTER[1] - 12.0 * np.sin(outer_t)
    inner_t = np.linspace(np.pi, -np.pi, 9)[:-1]
    pts[60:68, 0] = _MOUTH_CENTER[0] + 15.0 * np.cos(inner_t)
    pts[60:68, 1] = _MOUTH_CENTER[1] - 5.0 * np.sin(inner_t)
    return pts


TEMPLATE = template_face()
# Anchor order: left eye center, right eye center, mouth center.
TEMPLATE_ANCHORS = np.array(
    [
        TEMPLATE[36:42].mean(axis=0),
        TEMPLATE[42:48].mean(axis=0),
        TEMPLATE[48:60].mean(axis=0),
    ]
)


def _fit_similarity(src: np.ndarray, dst: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Least-squares similarity (scale + rotation + shift) mapping src
    anchors onto dst anchors, applied to points."""
    n = src.shape[0]
    m = np.zeros((2 * n, 4))
    m[0::2, 0] = src[:, 0]
    m[0::2, 1] = -src[:, 1]
    m[0::2, 2] = 1.0
    m[1::2, 0] = src[:, 1]
    m[1::2, 1] = src[:, 0]
    m[1::2, 3] = 1.0
    a, b, tx, ty = np.linalg.lstsq(m, dst.ravel(), rcond=None)[0]
    rot = np.array([[a, -b], [b, a]])
    return points @ rot.T + np.array([tx, ty])


@dataclass
class TrackerBackend:
    """Classical anchor tracker for high-contrast frontal faces.

    Finds the largest bright blob (face), then the dark cavities inside it
    (two eyes, one mouth), and fits the template through those anchors.
    """

    bright_threshold: int = 128
    dark_min_area: int = 10
    name: str = field(default="tracker-v1", init=False)

    def detect(self, frame: np.ndarray) -> np.ndarray | None:
        labels, n = ndimage.label(frame > self.bright_threshold)
        if n == 0:
            return None
        sizes = np.bincount(labels.ravel())
        sizes[0] = 0
        face_label = int(sizes.argmax())
        if sizes[face_label] < 0.005 * frame.size:
            return None
        face = labels == face_label
        rows = np.flatnonzero(face.any(axis=1))
        face_height = rows[-1] - rows[0] + 1
        holes = ndimage.binary_fill_holes(face) & ~face
        hlabels, hn = ndimage.label(holes)
        if hn < 3:
            return None
        idx = [i for i in range(1, hn + 1) if (hlabels == i).sum() >= self.dark_min_area]
        if len(idx) < 3:
            return None
        centroids = np.array(ndimage.center_of_mass(holes, hlabels, idx))  # (y, x)
        order = np.argsort(centroids[:, 0])
        eyes = centroids[order[:2]]
        mouth = centroids[order[-1]]
        if abs(eyes[0, 0] - eyes[1, 0]) > 0.15 * face_height:
            return None
        if mouth[0] - eyes[:, 0].mean() < 0.2 * face_height:
            return None
        eyes = eyes[np.argsort(eyes[:, 1])]  # left first
        anchors = np.array(
            [
                [eyes[0, 1], eyes[0, 0]],
                [eyes[1, 1], eyes[1, 0]],
                [mouth[1], mouth[0]],
            ]
        )
        return _fit_similarity(TEMPLATE_ANCHORS, anchors, TEMPLATE)


class DlibBackend:
    """Pretrained dlib frontal-face detector + 68-point shape predictor.

    Needs the dlib package and a shape-predictor model file named by the
    ADAPTERS_DLIB_MODEL environment variable.
    """

    ENV_VAR = "ADAPTERS_DLIB_MODEL"

    def __init__(self) -> None:
        import dlib

        model = os.environ.get(self.ENV_VAR, "")
        if not model or not Path(model).exists():
            raise AdapterError(f"set {self.ENV_VAR} to a 68-point shape predictor file")
        self.name = f"dlib-{dlib.__version__}"
        self._detector = dlib.get_frontal_face_detector()
        self._predictor = dlib.shape_predictor(model)

    @staticmethod
    def available() -> bool:
        try:
            import dlib  # noqa: F401
        except ImportError:
            return False
        model = os.environ.get(DlibBackend.ENV_VAR, "")
        return bool(model) and Path(model).exists()

    def detect(self, frame: np.ndarray) -> np.ndarray | None:
        rects = self._detector(frame)
        if not rects:
            return None
        shape = self._predictor(frame, rects[0])
        return np.array([[p.x, p.y] for p in shape.parts()], dtype=np.float64)


def get_backend(name: str = "auto"):
    if name == "auto":
        return DlibBackend() if DlibBackend.available() else TrackerBackend()
    if name == "tracker":
        return TrackerBackend()
    if name == "dlib":
        return DlibBackend()
    raise AdapterError(f"unknown landmark backend {name!r}")


@dataclass(frozen=True)
class LandmarkEmitResult:
    out: Path
    backend: str
    fps: float
    n_frames: int
    n_detected: int
    fills: list[tuple[int, int]]  # (filled frame, source frame)


def emit_landmarks(
    clip: str | Path,
    out: str | Path,
    backend: str = "auto",
    min_rate: float = 0.95,
) -> LandmarkEmitResult:
    """Extract one 68-point row per frame of a clip into a landmark CSV.

    Rejects the clip when fewer than min_rate of its frames have a
    detectable face; otherwise missing frames copy the nearest detection.
    """
    stack = read_frames(clip)
    det = get_backend(backend)
    rows: list[np.ndarray | None] = [det.detect(f) for f in stack.frames]
    found = [i for i, r in enumerate(rows) if r is not None]
    if len(found) / stack.n_frames < min_rate:
        raise NoFaceFound(str(clip), stack.n_frames, len(found), min_rate)
    fills: list[tuple[int, int]] = []
    for i, r in enumerate(rows):
        if r is None:
            src = min(found, key=lambda j: (abs(j - i), j))
            rows[i] = rows[src]
            fills.append((i, src))
            log.warning("frame %d: no detection, filled from frame %d", i, src)

    out = Path(out)
    header = "frame," + ",".join(f"x{i},y{i}" for i in range(1, N_POINTS + 1))
    lines = [
        f"# fps={stack.fps:g}",
        f"# tool={TOOL_VERSION} backend={det.name}",
        f"# interpolation=nearest-neighbor filled={len(fills)} of {stack.n_frames}",
    ]
    lines += [f"# filled frame {i} from {j}" for i, j in fills]
    lines.append(header)
    for i, r in enumerate(rows):
        lines.append(f"{i}," + ",".join(f"{v:.6g}" for v in r.ravel()))
    out.write_text("\n".join(lines) + "\n")
    return LandmarkEmitResult(
        out=out,
        backend=det.name,
        fps=stack.fps,
        n_frames=stack.n_frames,
        n_detected=len(found),
        fills=fills,
    )
