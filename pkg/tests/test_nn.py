import numpy as np
import pytest

from oracles import naive_conv_valid, naive_lstm_step
from veracity.errors import KernelTooLarge, ShapeMismatch
from veracity.nn import (
    LstmParams,
    LstmState,
    ModelKind,
    ModelSpec,
    backward,
    bilstm_forward,
    conv2d,
    forward,
    forward_batch,
    gradient_check,
    init_params,
    lstm_cell,
    lstm_forward,
    sigmoid,
    tanh,
    zero_state,
)


def random_lstm_params(rng, hidden, dim) -> LstmParams:
    def w():
        return rng.uniform(-0.5, 0.5, size=(hidden, hidden + dim))

    def b():
        return rng.uniform(-0.5, 0.5, size=hidden)

    return LstmParams(W_i=w(), W_f=w(), W_o=w(), W_C=w(), b_i=b(), b_f=b(), b_o=b(), b_C=b())


# -- activations ----------------------------------------------------------------


def test_sigmoid_values_and_stability():
    assert sigmoid(0.0) == 0.5
    assert abs(sigmoid(1.0) - 0.7310585786300049) < 1e-12
    assert sigmoid(1000.0) == 1.0
    assert sigmoid(-1000.0) == 0.0
    assert np.all(np.isfinite(sigmoid(np.array([-1e6, 0.0, 1e6]))))


def test_tanh_matches_numpy():
    x = np.linspace(-4, 4, 11)
    assert np.array_equal(tanh(x), np.tanh(x))


# -- recurrent cell --------------------------------------------------------------


def test_cell_zero_params_unit_cell_state():
    hidden, dim = 4, 3
    zeros_w = np.zeros((hidden, hidden + dim))
    zeros_b = np.zeros(hidden)
    p = LstmParams(
        W_i=zeros_w.copy(),
        W_f=zeros_w.copy(),
        W_o=zeros_w.copy(),
        W_C=zeros_w.copy(),
        b_i=zeros_b.copy(),
        b_f=zeros_b.copy(),
        b_o=zeros_b.copy(),
        b_C=zeros_b.copy(),
    )
    prev = LstmState(h=np.zeros(hidden), c=np.ones(hidden))
    out = lstm_cell(np.ones(dim), prev, p)
    expected = 0.5 * np.tanh(0.5)
    assert np.max(np.abs(out.h - expected)) < 1e-9
    assert np.max(np.abs(out.c - 0.5)) < 1e-12


def test_cell_matches_naive_oracle():
    rng = np.random.default_rng(0)
    hidden, dim = 5, 3
    p = random_lstm_params(rng, hidden, dim)
    h_prev = rng.standard_normal(hidden)
    c_prev = rng.standard_normal(hidden)
    x_t = rng.standard_normal(dim)
    out = lstm_cell(x_t, LstmState(h=h_prev, c=c_prev), p)
    h, c = naive_lstm_step(
        x_t, h_prev, c_prev, p.W_i, p.W_f, p.W_o, p.W_C, p.b_i, p.b_f, p.b_o, p.b_C
    )
    assert np.max(np.abs(out.h - h)) < 1e-12
    assert np.max(np.abs(out.c - c)) < 1e-12


def test_cell_rejects_wrong_shapes():
    rng = np.random.default_rng(1)
    p = random_lstm_params(rng, 4, 3)
    with pytest.raises(ShapeMismatch):
        lstm_cell(np.zeros(5), zero_state(4), p)
    with pytest.raises(ShapeMismatch):
        lstm_cell(np.zeros(3), zero_state(2), p)


def test_forward_equals_manual_unroll():
    rng = np.random.default_rng(2)
    hidden, dim, steps = 6, 4, 9
    p = random_lstm_params(rng, hidden, dim)
    seq = rng.standard_normal((steps, dim))
    states, _ = lstm_forward(seq, p)
    assert len(states) == steps

    manual = zero_state(hidden)
    for t in range(steps):
        manual = lstm_cell(seq[t], manual, p)
        assert np.max(np.abs(states[t].h - manual.h)) < 1e-12
        assert np.max(np.abs(states[t].c - manual.c)) < 1e-12


def test_bilstm_output_alignment():
    rng = np.random.default_rng(3)
    hidden, dim, steps = 4, 3, 7
    p_fwd = random_lstm_params(rng, hidden, dim)
    p_bwd = random_lstm_params(rng, hidden, dim)
    seq = rng.standard_normal((steps, dim))
    out = bilstm_forward(seq, p_fwd, p_bwd)
    assert out.shape == (steps, 2 * hidden)

    fwd_states, _ = lstm_forward(seq, p_fwd)
    bwd_states, _ = lstm_forward(seq[::-1], p_bwd)
    for t in range(steps):
        assert np.allclose(out[t, :hidden], fwd_states[t].h, atol=1e-12)
        # backward half at time t comes from processing x_T-1..x_t
        assert np.allclose(out[t, hidden:], bwd_states[steps - 1 - t].h, atol=1e-12)


# -- convolution ------------------------------------------------------------------


def test_conv2d_matches_naive_loops():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((10, 7))
    w = rng.standard_normal((3, 3))
    out = conv2d(x, w, b=0.25)
    assert out.shape == (8, 5)
    assert np.max(np.abs(out - naive_conv_valid(x, w, 0.25))) < 1e-12


def test_conv2d_hand_case():
    x = np.arange(9.0).reshape(3, 3)
    w = np.zeros((2, 2))
    w[0, 0] = 1.0
    out = conv2d(x, w)
    assert np.array_equal(out, [[0.0, 1.0], [3.0, 4.0]])


def test_conv2d_kernel_too_large():
    with pytest.raises(KernelTooLarge):
        conv2d(np.zeros((2, 2)), np.zeros((3, 3)))


# -- initialization ----------------------------------------------------------------


def test_init_deterministic_and_seed_sensitive():
    spec = ModelSpec(kind=ModelKind.LSTM, hidden=8, init_seed=7)
    a = init_params(spec, 5)
    b = init_params(spec, 5)
    assert sorted(a) == sorted(b)
    for k in a:
        assert np.array_equal(a[k], b[k])
    c = init_params(ModelSpec(kind=ModelKind.LSTM, hidden=8, init_seed=8), 5)
    assert any(not np.array_equal(a[k], c[k]) for k in a)


def test_init_forget_bias_is_one():
    params = init_params(ModelSpec(kind=ModelKind.LSTM, hidden=6), 4)
    assert np.all(params["b_f"] == 1.0)
    assert np.all(params["b_i"] == 0.0)
    assert params["head_w"].shape == (6,)


def test_init_shapes_per_kind():
    bi = init_params(ModelSpec(kind=ModelKind.BILSTM, hidden=3), 2)
    assert bi["fwd_W_i"].shape == (3, 5)
    assert bi["bwd_W_C"].shape == (3, 5)
    assert bi["head_w"].shape == (6,)
    conv = init_params(ModelSpec(kind=ModelKind.MINICONV, hidden=3), 2)
    assert conv["conv_w"].shape == (8, 3, 3)
    assert conv["conv_b"].shape == (8,)
    assert conv["head_w"].shape == (8,)


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(kind=ModelKind.LSTM, hidden=0)
    assert ModelSpec(kind="bilstm").kind is ModelKind.BILSTM


# -- full model forward ------------------------------------------------------------


@pytest.mark.parametrize("kind", list(ModelKind))
def test_forward_outputs_probability(kind):
    rng = np.random.default_rng(5)
    spec = ModelSpec(kind=kind, hidden=6, init_seed=1)
    params = init_params(spec, 4)
    x = rng.standard_normal((10, 4))
    p = forward(spec, params, x)
    assert 0.0 < p < 1.0


@pytest.mark.parametrize("kind", list(ModelKind))
def test_forward_batch_matches_single(kind):
    rng = np.random.default_rng(6)
    spec = ModelSpec(kind=kind, hidden=5, init_seed=2)
    params = init_params(spec, 3)
    batch = rng.standard_normal((4, 8, 3))
    probs, _ = forward_batch(spec, params, batch)
    assert probs.shape == (4,)
    for i in range(4):
        assert abs(probs[i] - forward(spec, params, batch[i])) < 1e-12


# -- gradients ----------------------------------------------------------------------


@pytest.mark.parametrize("kind", list(ModelKind))
def test_gradient_check_small_models(kind):
    rng = np.random.default_rng(7)
    spec = ModelSpec(kind=kind, hidden=4, init_seed=3)
    shape = (16, 8) if kind is ModelKind.MINICONV else (5, 3)
    params = init_params(spec, shape[1])
    x = rng.standard_normal(shape)
    report = gradient_check(spec, params, x, eps=1e-4)
    assert report.max_rel_error < 1e-4, report.worst_param


def test_gradient_check_flags_corrupted_gradient():
    rng = np.random.default_rng(8)
    spec = ModelSpec(kind=ModelKind.LSTM, hidden=4, init_seed=4)
    params = init_params(spec, 3)
    x = rng.standard_normal((5, 3))
    grads = backward(spec, params, x, 1.0)
    grads["W_i"] = grads["W_i"].copy()
    grads["W_i"][0, 0] += 0.05
    report = gradient_check(spec, params, x, eps=1e-4, grads=grads)
    assert report.max_rel_error > 1e-2
    assert report.worst_param.startswith("W_i")


def test_gradient_check_rejects_bad_eps():
    spec = ModelSpec(kind=ModelKind.LSTM, hidden=2, init_seed=0)
    params = init_params(spec, 2)
    with pytest.raises(ValueError):
        gradient_check(spec, params, np.zeros((3, 2)), eps=0.0)


def test_backward_upstream_scaling():
    """Gradients are linear in the upstream signal."""
    rng = np.random.default_rng(9)
    spec = ModelSpec(kind=ModelKind.LSTM, hidden=4, init_seed=5)
    params = init_params(spec, 3)
    x = rng.standard_normal((6, 3))
    g1 = backward(spec, params, x, 1.0)
    g3 = backward(spec, params, x, 3.0)
    for k in g1:
        assert np.max(np.abs(3.0 * g1[k] - g3[k])) < 1e-12
