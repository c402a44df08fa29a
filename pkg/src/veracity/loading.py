"""Turn manifest records into per-modality feature sequences."""

from __future__ import annotations

from .audio import MfccConfig, extract_mfcc, read_wav
from .dataset import SampleRecord
from .features import FeatureSequence, Modality
from .fusion import ModalityCombo
from .text import embeddings_to_features, parse_embeddings
from .visual import landmarks_to_features, parse_landmarks


def load_features(
    record: SampleRecord,
    combo: ModalityCombo,
    mfcc_config: MfccConfig | None = None,
) -> dict[Modality, FeatureSequence]:
    """Extract features for the modalities a combo needs, keyed by modality."""
    out: dict[Modality, FeatureSequence] = {}
    if Modality.VISUAL in combo:
        out[Modality.VISUAL] = landmarks_to_features(parse_landmarks(record.landmarks_path))
    if Modality.AUDIO in combo:
        out[Modality.AUDIO] = extract_mfcc(read_wav(record.audio_path), mfcc_config)
    if Modality.TEXT in combo:
        out[Modality.TEXT] = embeddings_to_features(parse_embeddings(record.embedding_path))
    return out
