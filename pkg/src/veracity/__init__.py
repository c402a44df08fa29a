"""Multimodal deception classification from audio, facial landmarks, and text."""

from .audio import (
    AudioSignal,
    MfccConfig,
    extract_mfcc,
    read_wav,
    write_mfcc_csv,
    write_wav,
)
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .dataset import (
    DatasetManifest,
    Label,
    SampleRecord,
    SplitSpec,
    load_manifest,
    split_dataset,
    validate_sample,
)
from .errors import DataError, NumericError, VeracityError
from .features import FeatureSequence, Modality
from .fusion import FusedInput, ModalityCombo, NormStats, all_combos, fuse, resample_sequence
from .nn import ModelKind, ModelSpec, gradient_check, init_params
from .text import EmbeddingMatrix, parse_embeddings, write_embeddings
from .training import TrainConfig, evaluate, predict, train
from .visual import LandmarkSequence, landmarks_to_features, parse_landmarks

__all__ = [
    "AudioSignal",
    "Checkpoint",
    "DataError",
    "DatasetManifest",
    "EmbeddingMatrix",
    "FeatureSequence",
    "FusedInput",
    "Label",
    "MfccConfig",
    "ModalityCombo",
    "Modality",
    "ModelKind",
    "ModelSpec",
    "NormStats",
    "NumericError",
    "SampleRecord",
    "SplitSpec",
    "TrainConfig",
    "VeracityError",
    "all_combos",
    "evaluate",
    "extract_mfcc",
    "fuse",
    "gradient_check",
    "init_params",
    "load_checkpoint",
    "load_manifest",
    "parse_embeddings",
    "parse_landmarks",
    "predict",
    "read_wav",
    "resample_sequence",
    "save_checkpoint",
    "split_dataset",
    "train",
    "validate_sample",
    "write_embeddings",
    "write_mfcc_csv",
    "write_wav",
]

__version__ = "0.1.0"
