"""Offline adapters that turn raw trial media into canonical pipeline inputs.

Three thin operations, one per modality: emit_landmarks (clip to 68-point
per-frame CSV), emit_embeddings (transcript to token-embedding file), and
emit_wav (any WAV to 16 kHz mono 16-bit PCM). This package communicates
with the downstream pipeline only through those file formats and its CLI;
it never imports it.
"""

from .audio import TARGET_RATE, WavEmitResult, emit_wav, read_audio, write_wav_int16
from .embeddings import (
    EMBED_DIM,
    BertBackend,
    EmbeddingEmitResult,
    HashedBackend,
    emit_embeddings,
    tokenize,
)
from .errors import (
    AdapterError,
    EmptyTranscript,
    NoFaceFound,
    UndecodableAudio,
    UndecodableVideo,
)
from .fixture import FixturePaths, make_fixture, render_face_clip, render_noise_clip
from .landmarks import (
    DlibBackend,
    LandmarkEmitResult,
    TrackerBackend,
    emit_landmarks,
    template_face,
)
from .video import FrameStack, read_frames, write_clip

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "BertBackend",
    "DlibBackend",
    "EMBED_DIM",
    "EmbeddingEmitResult",
    "EmptyTranscript",
    "FixturePaths",
    "FrameStack",
    "HashedBackend",
    "LandmarkEmitResult",
    "NoFaceFound",
    "TARGET_RATE",
    "TrackerBackend",
    "UndecodableAudio",
    "UndecodableVideo",
    "WavEmitResult",
    "emit_embeddings",
    "emit_landmarks",
    "emit_wav",
    "make_fixture",
    "read_audio",
    "read_frames",
    "render_face_clip",
    "render_noise_clip",
    "template_face",
    "tokenize",
    "write_clip",
    "write_wav_int16",
]
