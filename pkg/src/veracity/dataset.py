"""Sample/label data model, manifest parsing, validation, and splits.

The manifest is an explicit JSON file (no directory scanning) so label
assignment stays auditable.  Splits are stratified by label and fully
determined by (manifest, seed, fraction).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import MalformedManifest, TooFewSamples


class Label(Enum):
    TRUTHFUL = "truthful"
    DECEPTIVE = "deceptive"

    @classmethod
    def from_string(cls, s: str) -> "Label":
        for label in cls:
            if label.value == s:
                return label
        raise MalformedManifest(f"unknown label string: {s!r}")

    @property
    def target(self) -> float:
        """Regression target: deceptive is the positive class."""
        return 1.0 if self is Label.DECEPTIVE else 0.0


@dataclass
class SampleRecord:
    id: str
    audio_path: Path
    landmarks_path: Path
    embedding_path: Path
    label: Label


@dataclass
class DatasetManifest:
    samples: list[SampleRecord]

    @property
    def n_total(self) -> int:
        return len(self.samples)

    @property
    def n_deceptive(self) -> int:
        return sum(1 for s in self.samples if s.label is Label.DECEPTIVE)

    @property
    def n_truthful(self) -> int:
        return sum(1 for s in self.samples if s.label is Label.TRUTHFUL)


@dataclass
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0,1), got {self.train_fraction}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass
class ModalityCheck:
    modality: str
    ok: bool
    reason: str = ""


@dataclass
class ValidationResult:
    sample_id: str
    checks: list[ModalityCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


_REQUIRED_FIELDS = ("id", "audio", "landmarks", "embedding", "label")


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a manifest JSON file and validate its field-level invariants.

    Relative sample paths are resolved against the manifest's directory.
    File existence is deliberately not checked here; see validate_sample.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MalformedManifest(f"cannot read manifest {path}: {e}") from e
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise MalformedManifest(f"manifest is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("samples"), list):
        raise MalformedManifest('manifest must be an object with a "samples" list')

    base = path.parent
    samples: list[SampleRecord] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc["samples"]):
        if not isinstance(entry, dict):
            raise MalformedManifest(f"sample #{i} is not an object")
        for f in _REQUIRED_FIELDS:
            if f not in entry:
                raise MalformedManifest(f"sample #{i} is missing field {f!r}")
            if not isinstance(entry[f], str) or not entry[f]:
                raise MalformedManifest(f"sample #{i} field {f!r} must be a nonempty string")
        sid = entry["id"]
        if sid in seen:
            raise MalformedManifest(f"duplicate sample id {sid!r}")
        seen.add(sid)
        samples.append(
            SampleRecord(
                id=sid,
                audio_path=base / entry["audio"],
                landmarks_path=base / entry["landmarks"],
                embedding_path=base / entry["embedding"],
                label=Label.from_string(entry["label"]),
            )
        )
    return DatasetManifest(samples=samples)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_dataset(
    manifest: DatasetManifest, spec: SplitSpec
) -> tuple[list[SampleRecord], list[SampleRecord]]:
    """Deterministic stratified train/test split.

    Per label class, the train count is round-half-up(fraction * class size)
    so the remainder lands in train.  The permutation inside each class is a
    pure function of the seed.
    """
    if manifest.n_total < 2:
        raise TooFewSamples(f"need at least 2 samples to split, got {manifest.n_total}")

    by_label: dict[Label, list[SampleRecord]] = {label: [] for label in Label}
    for s in manifest.samples:
        by_label[s.label].append(s)
    for label, group in by_label.items():
        if not group:
            raise TooFewSamples(f"label class {label.value!r} is empty; cannot stratify")

    rng = random.Random(spec.seed)
    train: list[SampleRecord] = []
    test: list[SampleRecord] = []
    for label in Label:  # fixed class order keeps the RNG stream stable
        group = list(by_label[label])
        rng.shuffle(group)
        n_train = _round_half_up(spec.train_fraction * len(group))
        train.extend(group[:n_train])
        test.extend(group[n_train:])
    return train, test


def validate_sample(record: SampleRecord) -> ValidationResult:
    """Check that each referenced file exists and passes its header check.

    Failures are reported in the result, never raised.
    """
    # local imports keep dataset free of a hard dependency direction
    from .audio import check_wav_header
    from .text import parse_embeddings
    from .visual import parse_landmarks

    result = ValidationResult(sample_id=record.id)

    def run(modality: str, path: Path, checker) -> None:
        if not path.is_file():
            result.checks.append(ModalityCheck(modality, False, f"file not found: {path}"))
            return
        try:
            checker(path)
        except Exception as e:  # report, never raise
            result.checks.append(ModalityCheck(modality, False, str(e)))
        else:
            result.checks.append(ModalityCheck(modality, True))

    run("visual", record.landmarks_path, parse_landmarks)
    run("audio", record.audio_path, check_wav_header)
    run("text", record.embedding_path, parse_embeddings)
    return result
