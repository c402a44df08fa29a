import numpy as np
import pytest

from oracles import naive_dct_ii, naive_dft
from veracity.dsp import (
    bit_reverse_indices,
    dct_ii,
    dct_ii_matrix,
    fft,
    idct_ii,
    is_power_of_two,
)
from veracity.errors import ConfigError


def test_is_power_of_two():
    assert [n for n in range(1, 20) if is_power_of_two(n)] == [1, 2, 4, 8, 16]
    assert not is_power_of_two(0)
    assert not is_power_of_two(-4)


def test_bit_reverse_indices_n8():
    assert bit_reverse_indices(8).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_bit_reverse_rejects_non_power_of_two():
    with pytest.raises(ConfigError):
        bit_reverse_indices(12)


def test_fft_impulse_is_flat():
    x = np.zeros(16)
    x[0] = 1.0
    assert np.allclose(fft(x), np.ones(16), atol=1e-12)


def test_fft_constant_concentrates_at_dc():
    out = fft(np.ones(8))
    expected = np.zeros(8, dtype=complex)
    expected[0] = 8.0
    assert np.allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("n", [2, 4, 8, 32, 128, 512])
def test_fft_matches_naive_dft(n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal(n)
    assert np.max(np.abs(fft(x) - naive_dft(x))) < 1e-9


def test_fft_handles_complex_input():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    assert np.max(np.abs(fft(x) - naive_dft(x))) < 1e-9


def test_fft_batched_rows_match_individual_calls():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((5, 32))
    batched = fft(x)
    for row_in, row_out in zip(x, batched):
        assert np.allclose(fft(row_in), row_out, atol=1e-12)


def test_fft_rejects_non_power_of_two_length():
    with pytest.raises(ConfigError):
        fft(np.zeros(12))


def test_dct_matrix_is_orthonormal():
    c = dct_ii_matrix(26)
    assert np.max(np.abs(c @ c.T - np.eye(26))) < 1e-12


def test_dct_matches_naive_definition():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(26)
    assert np.max(np.abs(dct_ii(x) - naive_dct_ii(x))) < 1e-10


def test_dct_roundtrip():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((7, 26))
    assert np.max(np.abs(idct_ii(dct_ii(x)) - x)) < 1e-9


def test_dct_of_constant_loads_only_first_coefficient():
    y = dct_ii(np.full(26, 3.0))
    assert abs(y[0] - 3.0 * np.sqrt(26)) < 1e-12
    assert np.max(np.abs(y[1:])) < 1e-12
