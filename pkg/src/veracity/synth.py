"""Synthetic fixture datasets with a controllable cross-modality label signal.

Each sample carries one "signal bit" per modality.  A configurable share of
samples has exactly one modality's bit flipped against the label, so any
single modality is only partially informative while the majority over all
three recovers the label exactly.  The bits are rendered into real artifact
files: tones in WAV audio, mouth width in landmark CSVs, and a signed block
in embedding files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .audio import AudioSignal, write_wav
from .features import Modality
from .text import EmbeddingMatrix, write_embeddings
from .visual import LandmarkFrame, LandmarkSequence, write_landmarks

SAMPLE_RATE = 16_000

# tone frequencies for audio bit 0 / bit 1 (land in different mel bands)
TONE_HZ = (400.0, 1600.0)


def _base_face() -> np.ndarray:
    """Schematic 68-point face in the iBUG ordering, y-down pixel space."""
    pts = np.zeros((68, 2))
    # jaw: 17 points on a lower half ellipse
    theta = np.linspace(np.pi, 2 * np.pi, 17)
    pts[0:17, 0] = 65.0 * np.cos(theta)
    pts[0:17, 1] = -8.0 - 72.0 * np.sin(theta)
    # brows: 5 points each
    for side, cx in ((17, -30.0), (22, 30.0)):
        xs = np.linspace(cx - 18, cx + 18, 5)
        pts[side : side + 5, 0] = xs
        pts[side : side + 5, 1] = -42.0 - 4.0 * np.cos(np.linspace(-1.2, 1.2, 5))
    # nose bridge and base
    pts[27:31, 0] = 0.0
    pts[27:31, 1] = np.linspace(-30.0, -5.0, 4)
    pts[31:36, 0] = np.linspace(-10.0, 10.0, 5)
    pts[31:36, 1] = 2.0
    # eyes: 6 points each on small ellipses, centers 60 px apart
    angles = np.linspace(0, 2 * np.pi, 6, endpoint=False)
    for start, cx in ((36, -30.0), (42, 30.0)):
        pts[start : start + 6, 0] = cx + 9.0 * np.cos(angles)
        pts[start : start + 6, 1] = -25.0 + 5.0 * np.sin(angles)
    # mouth: 12 outer + 8 inner points
    outer = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    pts[48:60, 0] = 24.0 * np.cos(outer)
    pts[48:60, 1] = 30.0 + 10.0 * np.sin(outer)
    inner = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    pts[60:68, 0] = 16.0 * np.cos(inner)
    pts[60:68, 1] = 30.0 + 4.0 * np.sin(inner)
    return pts


def make_tone_wav(
    path: Path, bit: int, rng: np.random.Generator, duration_s: float = 0.6
) -> None:
    n = int(duration_s * SAMPLE_RATE)
    t = np.arange(n) / SAMPLE_RATE
    phase = rng.uniform(0, 2 * np.pi)
    samples = 0.4 * np.sin(2 * np.pi * TONE_HZ[bit] * t + phase)
    samples += 0.005 * rng.standard_normal(n)
    write_wav(path, AudioSignal(samples=np.clip(samples, -1.0, 1.0), sample_rate=SAMPLE_RATE))


def make_landmark_csv(
    path: Path, bit: int, rng: np.random.Generator, n_frames: int = 30, fps: float = 30.0
) -> None:
    base = _base_face()
    mouth_scale = 1.3 if bit else 0.75
    base[48:68, 0] *= mouth_scale
    # per-sample camera nuisance, removed by landmark normalization
    scale = rng.uniform(0.8, 1.25)
    shift = rng.uniform(-40.0, 40.0, size=2)
    frames = []
    for _ in range(n_frames):
        jitter = rng.normal(0.0, 0.5, size=(68, 2))
        pts = (base + jitter) * scale + shift + np.array([160.0, 120.0])
        frames.append(LandmarkFrame(points=pts))
    write_landmarks(path, LandmarkSequence(frames=frames, fps=fps))


def make_embedding_file(
    path: Path,
    bit: int,
    rng: np.random.Generator,
    tokens: int = 24,
    dim: int = 32,
    signal_dims: int = 8,
) -> None:
    values = rng.normal(0.0, 1.0, size=(tokens, dim))
    values[:, :signal_dims] = (1.0 if bit else -1.0) + rng.normal(0.0, 0.3, (tokens, signal_dims))
    write_embeddings(path, EmbeddingMatrix(values=values))


def _flip_schedule(n_per_class: int, clean_fraction: float) -> list[Modality | None]:
    """Per-class list of which modality (if any) disagrees with the label."""
    n_clean = int(round(clean_fraction * n_per_class))
    remainder = n_per_class - n_clean
    per_modality, extra = divmod(remainder, 3)
    schedule: list[Modality | None] = [None] * n_clean
    for i, m in enumerate((Modality.VISUAL, Modality.AUDIO, Modality.TEXT)):
        schedule.extend([m] * (per_modality + (1 if i < extra else 0)))
    return schedule


def generate_synthetic_dataset(
    out_dir: str | Path,
    n_samples: int = 120,
    seed: int = 0,
    clean_fraction: float = 0.1,
    text_dim: int = 32,
) -> Path:
    """Write WAV/landmark/embedding files plus a manifest; returns its path.

    Each label class gets the same flip schedule, so each single modality
    agrees with the label on (1 - (1 - clean_fraction)/3-ish) of samples
    while the across-modality majority always equals the label.
    """
    if n_samples % 2 != 0:
        raise ValueError("n_samples must be even (balanced classes)")
    out_dir = Path(out_dir)
    for sub in ("audio", "landmarks", "embeddings"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    per_class = _flip_schedule(n_samples // 2, clean_fraction)
    assignments = [("truthful", flip) for flip in per_class]
    assignments += [("deceptive", flip) for flip in per_class]
    rng.shuffle(assignments)

    entries = []
    for i, (label, flip) in enumerate(assignments):
        sid = f"s{i:03d}"
        label_bit = 1 if label == "deceptive" else 0
        bits = {m: (label_bit ^ (1 if flip is m else 0)) for m in Modality}
        wav = out_dir / "audio" / f"{sid}.wav"
        lmk = out_dir / "landmarks" / f"{sid}.csv"
        emb = out_dir / "embeddings" / f"{sid}.txt"
        make_tone_wav(wav, bits[Modality.AUDIO], rng)
        make_landmark_csv(lmk, bits[Modality.VISUAL], rng)
        make_embedding_file(emb, bits[Modality.TEXT], rng, dim=text_dim)
        entries.append(
            {
                "id": sid,
                "audio": str(wav.relative_to(out_dir)),
                "landmarks": str(lmk.relative_to(out_dir)),
                "embedding": str(emb.relative_to(out_dir)),
                "label": label,
            }
        )

    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps({"samples": entries}, indent=1) + "\n", encoding="utf-8"
    )
    return manifest_path


def generate_overfit_dataset(out_dir: str | Path, n_samples: int = 8, seed: int = 0) -> Path:
    """Tiny linearly separable set: the embedding signal block equals the label."""
    if n_samples % 2 != 0:
        raise ValueError("n_samples must be even (balanced classes)")
    out_dir = Path(out_dir)
    for sub in ("audio", "landmarks", "embeddings"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    entries = []
    for i in range(n_samples):
        sid = f"o{i:02d}"
        label = "deceptive" if i % 2 else "truthful"
        bit = 1 if label == "deceptive" else 0
        wav = out_dir / "audio" / f"{sid}.wav"
        lmk = out_dir / "landmarks" / f"{sid}.csv"
        emb = out_dir / "embeddings" / f"{sid}.txt"
        make_tone_wav(wav, 0, rng, duration_s=0.2)
        make_landmark_csv(lmk, 0, rng, n_frames=8)
        make_embedding_file(emb, bit, rng, tokens=12, dim=16, signal_dims=8)
        entries.append(
            {
                "id": sid,
                "audio": str(wav.relative_to(out_dir)),
                "landmarks": str(lmk.relative_to(out_dir)),
                "embedding": str(emb.relative_to(out_dir)),
                "label": label,
            }
        )
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps({"samples": entries}, indent=1) + "\n", encoding="utf-8"
    )
    return manifest_path
