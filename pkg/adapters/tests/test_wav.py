"""Canonical WAV emission: rate, downmix, duration, and decode failures."""

import numpy as np
import pytest
from scipy.io import wavfile

from veracity_adapters import TARGET_RATE, UndecodableAudio, emit_wav, read_audio, write_wav_int16


def _sine_stereo(n: int, rate: int) -> np.ndarray:
    t = np.arange(n) / rate
    return np.stack([0.3 * np.sin(2 * np.pi * 220 * t), 0.2 * np.sin(2 * np.pi * 330 * t)], axis=1)


def test_stereo_44k_to_mono_16k(tmp_path):
    src = tmp_path / "src.wav"
    write_wav_int16(src, _sine_stereo(441_007, 44100), 44100)
    r = emit_wav(src, tmp_path / "out.wav")
    data, rate = read_audio(tmp_path / "out.wav")
    assert rate == TARGET_RATE
    assert data.shape[1] == 1
    assert r.source_rate == 44100
    assert r.source_channels == 2


def test_duration_preserved_within_one_sample(tmp_path):
    for n in (441_007, 44100, 12345):
        src = tmp_path / f"s{n}.wav"
        write_wav_int16(src, _sine_stereo(n, 44100), 44100)
        r = emit_wav(src, tmp_path / f"o{n}.wav")
        assert abs(r.samples_out / TARGET_RATE - n / 44100) < 1.0 / TARGET_RATE


def test_silent_input_gives_silent_output(tmp_path):
    src = tmp_path / "sil.wav"
    write_wav_int16(src, np.zeros((22050, 2)), 44100)
    emit_wav(src, tmp_path / "out.wav")
    data, _ = read_audio(tmp_path / "out.wav")
    assert np.abs(data).max() == 0.0


def test_mono_16k_is_passthrough(tmp_path):
    src = tmp_path / "src.wav"
    x = 0.25 * np.sin(2 * np.pi * 440 * np.arange(8000) / TARGET_RATE)
    write_wav_int16(src, x, TARGET_RATE)
    emit_wav(src, tmp_path / "out.wav")
    a, _ = read_audio(src)
    b, _ = read_audio(tmp_path / "out.wav")
    np.testing.assert_array_equal(a, b)


def test_downmix_is_channel_mean(tmp_path):
    src = tmp_path / "src.wav"
    left = np.full(TARGET_RATE, 0.5)
    right = np.full(TARGET_RATE, -0.25)
    write_wav_int16(src, np.stack([left, right], axis=1), TARGET_RATE)
    emit_wav(src, tmp_path / "out.wav")
    data, _ = read_audio(tmp_path / "out.wav")
    assert abs(data.mean() - 0.125) < 1e-3


@pytest.mark.parametrize("dtype", ["uint8", "int16", "int32", "float32", "float64"])
def test_sample_formats_decode(tmp_path, dtype):
    t = np.arange(4410) / 44100
    x = 0.4 * np.sin(2 * np.pi * 220 * t)
    if dtype == "uint8":
        stored = np.round(x * 128 + 128).astype(np.uint8)
    elif dtype == "int16":
        stored = np.round(x * 32768).astype(np.int16)
    elif dtype == "int32":
        stored = np.round(x * 2147483648).clip(max=2**31 - 1).astype(np.int32)
    else:
        stored = x.astype(dtype)
    src = tmp_path / "src.wav"
    wavfile.write(src, 44100, stored)
    data, rate = read_audio(src)
    assert rate == 44100
    assert abs(np.abs(data).max() - 0.4) < 0.02


def test_garbage_is_undecodable(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"MThd not audio at all" * 4)
    with pytest.raises(UndecodableAudio):
        emit_wav(bad, tmp_path / "out.wav")


def test_truncated_header_is_undecodable(tmp_path):
    src = tmp_path / "src.wav"
    write_wav_int16(src, np.zeros(100), TARGET_RATE)
    clipped = tmp_path / "cut.wav"
    clipped.write_bytes(src.read_bytes()[:20])
    with pytest.raises(UndecodableAudio):
        emit_wav(clipped, tmp_path / "out.wav")


def test_missing_file_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        emit_wav(tmp_path / "nope.wav", tmp_path / "out.wav")
