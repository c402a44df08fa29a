"""Raw PCM audio to MFCC feature sequences.

The canonical input is RIFF/WAVE, PCM 16-bit little-endian, mono, 16 kHz.
The extraction pipeline is pre-emphasis, framing, Hamming window, power
spectrum, triangular mel filterbank, log, orthonormal DCT-II.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import dct_ii_matrix, fft, is_power_of_two
from .errors import ConfigError, CorruptWav, DomainError, SignalTooShort, UnsupportedWav
from .features import FeatureSequence, Modality

CANONICAL_SAMPLE_RATE = 16_000


@dataclass
class AudioSignal:
    samples: np.ndarray  # float64 in [-1, 1]
    sample_rate: int

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("samples must be 1-D")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass
class MfccConfig:
    frame_length_ms: float = 25.0
    hop_ms: float = 10.0
    n_fft: int = 512
    n_mels: int = 26
    n_coeffs: int = 13
    pre_emphasis: float = 0.97
    log_floor: float = 1e-10
    f_min: float = 0.0
    f_max: float | None = None  # None means sample_rate / 2

    def __post_init__(self) -> None:
        if self.n_coeffs > self.n_mels:
            raise ConfigError(f"n_coeffs ({self.n_coeffs}) must be <= n_mels ({self.n_mels})")
        if self.f_min < 0:
            raise ConfigError("f_min must be >= 0")

    def frame_length(self, sample_rate: int) -> int:
        return int(round(self.frame_length_ms * sample_rate / 1000.0))

    def hop(self, sample_rate: int) -> int:
        return int(round(self.hop_ms * sample_rate / 1000.0))

    def effective_f_max(self, sample_rate: int) -> float:
        return sample_rate / 2.0 if self.f_max is None else self.f_max

    def validate_for(self, sample_rate: int) -> None:
        if self.n_fft < self.frame_length(sample_rate):
            raise ConfigError(
                f"n_fft ({self.n_fft}) is smaller than the frame length "
                f"({self.frame_length(sample_rate)} samples)"
            )
        f_max = self.effective_f_max(sample_rate)
        if not self.f_min < f_max <= sample_rate / 2.0:
            raise ConfigError(f"need 0 <= f_min < f_max <= Nyquist, got [{self.f_min}, {f_max}]")


@dataclass
class MelFilterbank:
    weights: np.ndarray  # n_mels x (n_fft // 2 + 1), nonnegative
    center_freqs: np.ndarray  # n_mels peak frequencies in Hz
    edge_freqs: np.ndarray  # n_mels + 2 band edges in Hz


@dataclass
class WavInfo:
    sample_rate: int
    channels: int
    bit_depth: int
    n_frames: int


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptWav(f"truncated file while reading {what}")
    return data


def _parse_wav(path: Path, want_data: bool) -> tuple[WavInfo, bytes | None]:
    with open(path, "rb") as fh:
        header = _read_exact(fh, 12, "RIFF header")
        if header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise CorruptWav(f"{path} is not a RIFF/WAVE file")

        fmt = None
        data: bytes | None = None
        data_size: int | None = None
        while True:
            chunk_header = fh.read(8)
            if len(chunk_header) == 0:
                break
            if len(chunk_header) < 8:
                raise CorruptWav("truncated chunk header")
            chunk_id, size = struct.unpack("<4sI", chunk_header)
            if chunk_id == b"fmt ":
                if size < 16:
                    raise CorruptWav("fmt chunk too small")
                body = _read_exact(fh, size, "fmt chunk")
                fmt = struct.unpack("<HHIIHH", body[:16])
            elif chunk_id == b"data":
                data_size = size
                if want_data:
                    data = _read_exact(fh, size, "data chunk")
                else:
                    fh.seek(size, 1)
            else:
                fh.seek(size, 1)
            if size % 2 == 1:  # chunks are word-aligned
                fh.seek(1, 1)

        if fmt is None:
            raise CorruptWav("missing fmt chunk")
        if data_size is None:
            raise CorruptWav("missing data chunk")

    audio_format, channels, sample_rate, _, block_align, bit_depth = fmt
    if audio_format != 1:
        raise UnsupportedWav(f"codec={audio_format}, expected PCM (1)")
    if channels != 1:
        raise UnsupportedWav(f"channels={channels}, expected mono")
    if sample_rate != CANONICAL_SAMPLE_RATE:
        raise UnsupportedWav(f"sample_rate={sample_rate}, expected {CANONICAL_SAMPLE_RATE}")
    if bit_depth != 16:
        raise UnsupportedWav(f"bit_depth={bit_depth}, expected 16")
    if block_align not in (0, 2):
        raise CorruptWav(f"block_align={block_align} inconsistent with mono 16-bit")

    info = WavInfo(sample_rate, channels, bit_depth, data_size // 2)
    return info, data


def check_wav_header(path: str | Path) -> WavInfo:
    """Validate the container and format chunks without loading samples."""
    info, _ = _parse_wav(Path(path), want_data=False)
    return info


def read_wav(path: str | Path) -> AudioSignal:
    """Read a canonical WAV file; sample s is normalized to s / 32768."""
    info, data = _parse_wav(Path(path), want_data=True)
    assert data is not None
    samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    return AudioSignal(samples=samples, sample_rate=info.sample_rate)


def write_wav(path: str | Path, signal: AudioSignal) -> None:
    """Write a canonical mono 16-bit PCM WAV (values clipped to [-1, 1))."""
    pcm = np.clip(np.round(signal.samples * 32768.0), -32768, 32767).astype("<i2")
    data = pcm.tobytes()
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 36 + len(data)))
        fh.write(b"WAVE")
        fh.write(b"fmt ")
        rate = signal.sample_rate
        fh.write(struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16))
        fh.write(b"data")
        fh.write(struct.pack("<I", len(data)))
        fh.write(data)
        if len(data) % 2 == 1:
            fh.write(b"\x00")


def hz_to_mel(f: float | np.ndarray) -> float | np.ndarray:
    """HTK mel scale: mel = 2595 * log10(1 + f / 700)."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise DomainError("frequency must be >= 0")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(mel: float | np.ndarray) -> float | np.ndarray:
    mel = np.asarray(mel, dtype=np.float64)
    if np.any(mel < 0):
        raise DomainError("mel value must be >= 0")
    out = 700.0 * (np.power(10.0, mel / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


def build_mel_filterbank(config: MfccConfig, sample_rate: int) -> MelFilterbank:
    """Triangular filters with peaks equally spaced on the mel axis.

    FFT bin k maps to frequency k * sample_rate / n_fft; each triangle peaks
    at 1.0 (no area normalization) and is sampled at the bin frequencies.
    """
    config.validate_for(sample_rate)
    n_bins = config.n_fft // 2 + 1
    edges_mel = np.linspace(
        hz_to_mel(config.f_min),
        hz_to_mel(config.effective_f_max(sample_rate)),
        config.n_mels + 2,
    )
    edges_hz = mel_to_hz(edges_mel)
    bin_freqs = np.arange(n_bins) * sample_rate / config.n_fft

    weights = np.zeros((config.n_mels, n_bins))
    for m in range(config.n_mels):
        lo, center, hi = edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        weights[m] = np.maximum(0.0, np.minimum(rising, falling))
        if not np.any(weights[m] > 0):
            raise ConfigError(
                f"mel filter {m} has no positive weight; too many filters for "
                f"n_fft={config.n_fft} at {sample_rate} Hz"
            )
    return MelFilterbank(weights=weights, center_freqs=edges_hz[1:-1], edge_freqs=edges_hz)


def pre_emphasis(samples: np.ndarray, coefficient: float) -> np.ndarray:
    """y[n] = x[n] - c * x[n-1], with x[-1] taken as 0."""
    samples = np.asarray(samples, dtype=np.float64)
    out = samples.copy()
    out[1:] -= coefficient * samples[:-1]
    return out


def hamming_window(length: int) -> np.ndarray:
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def frame_signal(samples: np.ndarray, frame_length: int, hop: int) -> np.ndarray:
    """Slice a signal into complete frames (no padding): T x frame_length."""
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < frame_length:
        raise SignalTooShort(f"signal has {n} samples, need at least {frame_length}")
    n_frames = 1 + (n - frame_length) // hop
    idx = np.arange(frame_length)[None, :] + hop * np.arange(n_frames)[:, None]
    return samples[idx]


def power_spectrum(frame: np.ndarray, n_fft: int) -> np.ndarray:
    """|X_k|^2 for the first n_fft/2 + 1 DFT bins of a zero-padded frame."""
    if not is_power_of_two(n_fft):
        raise ConfigError(f"n_fft must be a power of two, got {n_fft}")
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] > n_fft:
        raise ConfigError(f"frame length {frame.shape[-1]} exceeds n_fft {n_fft}")
    if frame.shape[-1] < n_fft:
        pad = [(0, 0)] * (frame.ndim - 1) + [(0, n_fft - frame.shape[-1])]
        frame = np.pad(frame, pad)
    spectrum = fft(frame)[..., : n_fft // 2 + 1]
    return np.abs(spectrum) ** 2


def log_mel_energies(signal: AudioSignal, config: MfccConfig | None = None) -> np.ndarray:
    """T x n_mels matrix of log filterbank energies (the pre-DCT stage)."""
    config = config or MfccConfig()
    config.validate_for(signal.sample_rate)
    frame_length = config.frame_length(signal.sample_rate)
    hop = config.hop(signal.sample_rate)

    emphasized = pre_emphasis(signal.samples, config.pre_emphasis)
    frames = frame_signal(emphasized, frame_length, hop) * hamming_window(frame_length)
    spectra = power_spectrum(frames, config.n_fft)
    filterbank = build_mel_filterbank(config, signal.sample_rate)
    energies = spectra @ filterbank.weights.T
    return np.log(np.maximum(energies, config.log_floor))


def extract_mfcc(signal: AudioSignal, config: MfccConfig | None = None) -> FeatureSequence:
    """Full MFCC pipeline; output is T x n_coeffs at the hop rate."""
    config = config or MfccConfig()
    log_energies = log_mel_energies(signal, config)
    coeffs = log_energies @ dct_ii_matrix(config.n_mels).T[:, : config.n_coeffs]
    frame_rate = 1000.0 / config.hop_ms
    return FeatureSequence(modality=Modality.AUDIO, frames=coeffs, frame_rate=frame_rate)


def mfcc_csv_text(seq: FeatureSequence, config: MfccConfig | None = None) -> str:
    """Feature dump: header t,c0,...,c12; floats at 9 significant digits."""
    config = config or MfccConfig()
    n = seq.dim
    hop_s = config.hop_ms / 1000.0
    lines = ["t," + ",".join(f"c{i}" for i in range(n))]
    for i, row in enumerate(seq.frames):
        lines.append(f"{i * hop_s:.9g}," + ",".join(f"{v:.9g}" for v in row))
    return "\n".join(lines) + "\n"


def write_mfcc_csv(path: str | Path, seq: FeatureSequence, config: MfccConfig | None = None) -> None:
    Path(path).write_text(mfcc_csv_text(seq, config), encoding="utf-8")
