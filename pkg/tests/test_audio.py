import struct

import numpy as np
import pytest

from oracles import naive_dft
from veracity.audio import (
    AudioSignal,
    MfccConfig,
    build_mel_filterbank,
    check_wav_header,
    extract_mfcc,
    frame_signal,
    hamming_window,
    hz_to_mel,
    log_mel_energies,
    mel_to_hz,
    mfcc_csv_text,
    power_spectrum,
    pre_emphasis,
    read_wav,
    write_wav,
)
from veracity.errors import (
    ConfigError,
    CorruptWav,
    DomainError,
    SignalTooShort,
    UnsupportedWav,
)

SR = 16_000


def sine(freq: float, seconds: float = 1.0, amp: float = 0.5) -> AudioSignal:
    t = np.arange(int(seconds * SR)) / SR
    return AudioSignal(samples=amp * np.sin(2 * np.pi * freq * t), sample_rate=SR)


# -- mel scale ---------------------------------------------------------------


def test_mel_scale_anchor_points():
    assert hz_to_mel(0.0) == 0.0
    # 2595 * log10(2), computed independently at high precision
    assert abs(hz_to_mel(700.0) - 781.1728387) < 1e-6


def test_mel_scale_is_monotonic_and_invertible():
    freqs = np.linspace(0.0, 8000.0, 257)
    mels = hz_to_mel(freqs)
    assert np.all(np.diff(mels) > 0)
    assert np.max(np.abs(mel_to_hz(mels) - freqs)) < 1e-6


def test_mel_scale_rejects_negative_frequency():
    with pytest.raises(DomainError):
        hz_to_mel(-1.0)
    with pytest.raises(DomainError):
        mel_to_hz(-5.0)


# -- windowing, framing, spectra ----------------------------------------------


def test_hamming_window_endpoints_and_symmetry():
    w = hamming_window(400)
    assert abs(w[0] - 0.08) < 1e-12
    assert abs(w[-1] - 0.08) < 1e-12
    assert np.max(np.abs(w - w[::-1])) < 1e-12
    assert w.max() <= 1.0 + 1e-12


def test_pre_emphasis_definition():
    x = np.array([1.0, 2.0, 3.0, 5.0])
    y = pre_emphasis(x, 0.97)
    assert y[0] == 1.0
    assert np.allclose(y[1:], x[1:] - 0.97 * x[:-1])


def test_frame_count_one_second():
    frames = frame_signal(np.zeros(SR), frame_length=400, hop=160)
    assert frames.shape == (98, 400)


def test_frame_content_offsets():
    x = np.arange(1000, dtype=np.float64)
    frames = frame_signal(x, frame_length=400, hop=160)
    assert frames.shape == (4, 400)
    for i, frame in enumerate(frames):
        assert np.array_equal(frame, x[i * 160 : i * 160 + 400])


def test_frame_signal_too_short():
    with pytest.raises(SignalTooShort):
        frame_signal(np.zeros(399), frame_length=400, hop=160)


def test_power_spectrum_all_ones_frame():
    ps = power_spectrum(np.ones(4), n_fft=4)
    assert np.allclose(ps, [16.0, 0.0, 0.0], atol=1e-12)


def test_power_spectrum_matches_naive_dft():
    rng = np.random.default_rng(11)
    frame = rng.standard_normal(400)
    ps = power_spectrum(frame, n_fft=512)
    padded = np.zeros(512)
    padded[:400] = frame
    expected = np.abs(naive_dft(padded)[:257]) ** 2
    assert ps.shape == (257,)
    assert np.max(np.abs(ps - expected)) < 1e-9


def test_power_spectrum_rejects_bad_nfft():
    with pytest.raises(ConfigError):
        power_spectrum(np.ones(4), n_fft=6)
    with pytest.raises(ConfigError):
        power_spectrum(np.ones(600), n_fft=512)


# -- mel filterbank ------------------------------------------------------------


def test_filterbank_shape_and_normalization():
    bank = build_mel_filterbank(MfccConfig(), SR)
    assert bank.weights.shape == (26, 257)
    assert np.all(bank.weights >= 0.0)
    # triangles peak at 1.0 up to bin quantization
    assert np.all(bank.weights.max(axis=1) > 0.7)
    assert np.all(bank.weights.max(axis=1) <= 1.0 + 1e-12)


def test_filterbank_centers_equally_spaced_in_mel():
    bank = build_mel_filterbank(MfccConfig(), SR)
    center_mels = hz_to_mel(bank.center_freqs)
    gaps = np.diff(center_mels)
    assert np.max(np.abs(gaps - gaps[0])) < 1e-6


def test_tone_energy_lands_in_matching_filter():
    bank = build_mel_filterbank(MfccConfig(), SR)
    signal = sine(440.0)
    frames = frame_signal(pre_emphasis(signal.samples, 0.97), 400, 160)
    ps = power_spectrum(frames[0] * hamming_window(400), 512)
    responses = bank.weights @ ps
    best = int(np.argmax(responses))
    lo, hi = bank.edge_freqs[best], bank.edge_freqs[best + 2]
    assert lo <= 440.0 <= hi


# -- WAV io --------------------------------------------------------------------


def test_wav_roundtrip(tmp_path):
    rng = np.random.default_rng(12)
    original = AudioSignal(samples=rng.uniform(-0.9, 0.9, 2000), sample_rate=SR)
    path = tmp_path / "x.wav"
    write_wav(path, original)
    back = read_wav(path)
    assert back.sample_rate == SR
    assert len(back.samples) == 2000
    # 16-bit quantization bounds the error by one step
    assert np.max(np.abs(back.samples - original.samples)) <= 1.0 / 32768.0


def test_wav_header_info(tone_wav):
    info = check_wav_header(tone_wav)
    assert info.sample_rate == SR
    assert info.channels == 1
    assert info.bit_depth == 16
    assert info.n_frames == SR


def _wav_bytes(channels=1, bits=16, rate=SR, data=b"\x00\x00"):
    block = channels * bits // 8
    return (
        b"RIFF"
        + struct.pack("<I", 36 + len(data))
        + b"WAVE"
        + b"fmt "
        + struct.pack("<IHHIIHH", 16, 1, channels, rate, rate * block, block, bits)
        + b"data"
        + struct.pack("<I", len(data))
        + data
    )


def test_wav_rejects_stereo(tmp_path):
    path = tmp_path / "stereo.wav"
    path.write_bytes(_wav_bytes(channels=2, data=b"\x00" * 8))
    with pytest.raises(UnsupportedWav, match="channels"):
        check_wav_header(path)


def test_wav_rejects_wrong_bit_depth(tmp_path):
    path = tmp_path / "wide.wav"
    path.write_bytes(_wav_bytes(bits=32, data=b"\x00" * 8))
    with pytest.raises(UnsupportedWav):
        check_wav_header(path)


def test_wav_rejects_truncated_data(tmp_path):
    path = tmp_path / "cut.wav"
    whole = _wav_bytes(data=b"\x00" * 64)
    path.write_bytes(whole[:-10])
    with pytest.raises(CorruptWav):
        read_wav(path)


def test_wav_rejects_non_riff(tmp_path):
    path = tmp_path / "junk.wav"
    path.write_bytes(b"OggS" + b"\x00" * 100)
    with pytest.raises(CorruptWav):
        check_wav_header(path)


# -- MFCC ----------------------------------------------------------------------


def test_mfcc_shape_one_second():
    seq = extract_mfcc(sine(300.0))
    assert seq.frames.shape == (98, 13)
    assert seq.frame_rate == 100.0


def test_mfcc_silence_higher_coefficients_vanish():
    seq = extract_mfcc(AudioSignal(samples=np.zeros(SR), sample_rate=SR))
    assert np.max(np.abs(seq.frames[:, 1:])) < 1e-9
    # c0 is the DCT of a constant log-floor vector: sqrt(26) * ln(1e-10)
    expected_c0 = np.sqrt(26.0) * np.log(1e-10)
    assert np.max(np.abs(seq.frames[:, 0] - expected_c0)) < 1e-9


def test_mfcc_gain_shifts_only_c0():
    quiet = extract_mfcc(sine(500.0, amp=0.2)).frames
    loud = extract_mfcc(sine(500.0, amp=0.8)).frames
    # power scales by 16 so log-mel shifts uniformly by ln(16)
    shift = loud[:, 0] - quiet[:, 0]
    assert np.max(np.abs(shift - np.sqrt(26.0) * np.log(16.0))) < 1e-6
    assert np.max(np.abs(loud[:, 1:] - quiet[:, 1:])) < 1e-6


def test_log_mel_energies_use_floor():
    out = log_mel_energies(AudioSignal(samples=np.zeros(SR), sample_rate=SR))
    assert np.allclose(out, np.log(1e-10))


def test_mfcc_csv_format():
    seq = extract_mfcc(sine(300.0, seconds=0.05))
    text = mfcc_csv_text(seq)
    lines = text.strip().split("\n")
    assert lines[0] == "t," + ",".join(f"c{i}" for i in range(13))
    assert len(lines) == 1 + seq.length
    first = lines[1].split(",")
    assert first[0] == "0"
    assert len(first) == 14
    second = lines[2].split(",")
    assert abs(float(second[0]) - 0.01) < 1e-12


def test_mfcc_config_validation():
    with pytest.raises(ConfigError):
        MfccConfig(n_coeffs=30)
    with pytest.raises(ConfigError):
        MfccConfig(frame_length_ms=40.0).validate_for(SR)  # 640 > 512
    with pytest.raises(ConfigError):
        MfccConfig(f_max=9000.0).validate_for(SR)  # above Nyquist
