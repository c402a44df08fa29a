import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from veracity.audio import AudioSignal, write_wav
from veracity.synth import generate_overfit_dataset, generate_synthetic_dataset

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        line = f"{name}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def synth_manifest(tmp_path_factory) -> Path:
    """120-sample mixed-signal fixture shared by the slower tests."""
    root = tmp_path_factory.mktemp("synth120")
    return generate_synthetic_dataset(root, n_samples=120, seed=0)


@pytest.fixture(scope="session")
def overfit_manifest(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("overfit8")
    return generate_overfit_dataset(root, n_samples=8, seed=0)


@pytest.fixture
def tone_wav(tmp_path) -> Path:
    """One second of a 440 Hz tone at the canonical rate."""
    t = np.arange(16_000) / 16_000.0
    samples = 0.5 * np.sin(2 * np.pi * 440.0 * t)
    path = tmp_path / "tone.wav"
    write_wav(path, AudioSignal(samples=samples, sample_rate=16_000))
    return path
