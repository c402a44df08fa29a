"""Convert arbitrary WAV sources to the canonical 16 kHz mono 16-bit form.

Decoding is delegated to scipy.io.wavfile (PCM 8/16/24/32 and IEEE float,
any channel count and rate). Multichannel audio is downmixed by channel mean
and resampled with a polyphase anti-aliasing filter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import UndecodableAudio

TARGET_RATE = 16000

# Full-scale divisor per storage dtype; 24-bit arrives left-justified in int32.
_SCALE: dict[str, float] = {
    "int16": 32768.0,
    "int32": 2147483648.0,
    "float32": 1.0,
    "float64": 1.0,
}


def read_audio(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode a WAV file to float64 samples in [-1, 1], shape (frames, channels)."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rate, data = wavfile.read(str(path))
    except FileNotFoundError:
        raise
    except Exception as e:
        raise UndecodableAudio(f"{path}: {e}") from e
    if data.size == 0:
        raise UndecodableAudio(f"{path}: no samples")
    if data.ndim == 1:
        data = data[:, None]
    if data.dtype.name == "uint8":
        out = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype.name in _SCALE:
        out = data.astype(np.float64) / _SCALE[data.dtype.name]
    else:
        raise UndecodableAudio(f"{path}: unsupported sample type {data.dtype}")
    return out, int(rate)


def write_wav_int16(path: str | Path, samples: np.ndarray, rate: int) -> None:
    """Quantize float samples in [-1, 1] to 16-bit PCM and write a WAV file."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 32767.0 / 32768.0)
    pcm = np.round(clipped * 32768.0).astype(np.int16)
    wavfile.write(str(path), rate, pcm)


@dataclass(frozen=True)
class WavEmitResult:
    """What emit_wav produced and what it was derived from."""

    out: Path
    source_rate: int
    source_channels: int
    samples_in: int
    samples_out: int

    @property
    def duration_s(self) -> float:
        return self.samples_out / TARGET_RATE


def emit_wav(source: str | Path, out: str | Path) -> WavEmitResult:
    """Emit a canonical WAV: 16 kHz, mono (channel mean), 16-bit PCM.

    Output duration matches the source within one output sample period.
    """
    data, rate = read_audio(source)
    n_in, n_ch = data.shape
    mono = data.mean(axis=1)
    if rate != TARGET_RATE:
        g = math.gcd(TARGET_RATE, rate)
        mono = resample_poly(mono, TARGET_RATE // g, rate // g)
    write_wav_int16(out, mono, TARGET_RATE)
    return WavEmitResult(
        out=Path(out),
        source_rate=rate,
        source_channels=n_ch,
        samples_in=n_in,
        samples_out=mono.shape[0],
    )
