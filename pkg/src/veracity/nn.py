"""From-scratch differentiable building blocks with analytic backward passes.

Three classifier architectures over a T x D input matrix, each ending in a
dense layer and a sigmoid:

* LSTM: gated recurrence, final hidden state read out.
* BiLSTM: independent forward and backward recurrences; the read-out
  concatenates each direction's final state.
* MiniConv: the input treated as a one-channel image, 8 3x3 filters, tanh,
  global average pooling per filter.

All math is 64-bit and pure; backward passes are hand-derived reverse-mode
and validated against central finite differences by gradient_check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import KernelTooLarge, ShapeMismatch

N_CONV_FILTERS = 8
CONV_KERNEL = 3

Params = dict[str, np.ndarray]


class ModelKind(Enum):
    LSTM = "lstm"
    BILSTM = "bilstm"
    MINICONV = "miniconv"


@dataclass
class ModelSpec:
    kind: ModelKind
    hidden: int = 128
    init_seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            self.kind = ModelKind(self.kind)
        if self.hidden < 1:
            raise ValueError("hidden size must be >= 1")


def sigmoid(x):
    """Numerically stable logistic function, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    return float(out) if out.ndim == 0 else out


def tanh(x):
    out = np.tanh(np.asarray(x, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# LSTM


@dataclass
class LstmParams:
    """Gate weights over the concatenation [h_prev; x_t], biases per gate."""

    W_i: np.ndarray
    W_f: np.ndarray
    W_o: np.ndarray
    W_C: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_C: np.ndarray

    def __post_init__(self) -> None:
        h, hd = self.W_i.shape
        for name in ("W_f", "W_o", "W_C"):
            if getattr(self, name).shape != (h, hd):
                raise ShapeMismatch(f"{name} shape {getattr(self, name).shape} != ({h}, {hd})")
        for name in ("b_i", "b_f", "b_o", "b_C"):
            if getattr(self, name).shape != (h,):
                raise ShapeMismatch(f"{name} shape {getattr(self, name).shape} != ({h},)")
        if hd <= h:
            raise ShapeMismatch(f"weight width {hd} must exceed hidden size {h}")

    @property
    def hidden(self) -> int:
        return self.W_i.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_i.shape[1] - self.W_i.shape[0]


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray


def zero_state(hidden: int) -> LstmState:
    return LstmState(h=np.zeros(hidden), c=np.zeros(hidden))


def lstm_cell(x_t: np.ndarray, prev: LstmState, p: LstmParams) -> LstmState:
    """One gated recurrence step: i/f/o gates, cell update, hidden output."""
    x_t = np.asarray(x_t, dtype=np.float64)
    if x_t.shape != (p.input_dim,):
        raise ShapeMismatch(f"x_t shape {x_t.shape} != ({p.input_dim},)")
    if prev.h.shape != (p.hidden,) or prev.c.shape != (p.hidden,):
        raise ShapeMismatch("state shape does not match hidden size")
    z = np.concatenate([prev.h, x_t])
    i = sigmoid(p.W_i @ z + p.b_i)
    f = sigmoid(p.W_f @ z + p.b_f)
    o = sigmoid(p.W_o @ z + p.b_o)
    g = tanh(p.W_C @ z + p.b_C)
    c = f * prev.c + i * g
    h = o * tanh(c)
    return LstmState(h=h, c=c)


@dataclass
class LstmCache:
    """Per-step activations retained for backpropagation through time."""

    z: np.ndarray  # T x B x (H + D)
    i: np.ndarray  # T x B x H
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c: np.ndarray
    c_prev: np.ndarray
    tanh_c: np.ndarray


def lstm_forward(
    seq: np.ndarray, p: LstmParams, h0: LstmState | None = None
) -> tuple[list[LstmState], LstmCache]:
    """Iterate lstm_cell left to right; cache activations for the backward pass."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ShapeMismatch(f"sequence must be T x D with T >= 1, got {seq.shape}")
    state = h0 if h0 is not None else zero_state(p.hidden)
    h_last, cache = _lstm_forward_batch(seq[:, None, :], p, h0=state)
    states = [
        LstmState(h=cache.o[t, 0] * cache.tanh_c[t, 0], c=cache.c[t, 0])
        for t in range(seq.shape[0])
    ]
    return states, cache


def _stack(p: LstmParams) -> tuple[np.ndarray, np.ndarray]:
    w = np.concatenate([p.W_i, p.W_f, p.W_o, p.W_C], axis=0)
    b = np.concatenate([p.b_i, p.b_f, p.b_o, p.b_C])
    return w, b


def _lstm_forward_batch(
    x: np.ndarray, p: LstmParams, h0: LstmState | None = None
) -> tuple[np.ndarray, LstmCache]:
    """Batched recurrence over x of shape T x B x D; returns final hidden (B x H)."""
    t_len, batch, dim = x.shape
    if dim != p.input_dim:
        raise ShapeMismatch(f"input dim {dim} != params input dim {p.input_dim}")
    hidden = p.hidden
    w, b = _stack(p)

    h = np.zeros((batch, hidden)) if h0 is None else np.tile(h0.h, (batch, 1))
    c = np.zeros((batch, hidden)) if h0 is None else np.tile(h0.c, (batch, 1))

    cache = LstmCache(
        z=np.empty((t_len, batch, hidden + dim)),
        i=np.empty((t_len, batch, hidden)),
        f=np.empty((t_len, batch, hidden)),
        o=np.empty((t_len, batch, hidden)),
        g=np.empty((t_len, batch, hidden)),
        c=np.empty((t_len, batch, hidden)),
        c_prev=np.empty((t_len, batch, hidden)),
        tanh_c=np.empty((t_len, batch, hidden)),
    )
    for t in range(t_len):
        z = np.concatenate([h, x[t]], axis=1)
        a = z @ w.T + b
        i = sigmoid(a[:, :hidden])
        f = sigmoid(a[:, hidden : 2 * hidden])
        o = sigmoid(a[:, 2 * hidden : 3 * hidden])
        g = np.tanh(a[:, 3 * hidden :])
        cache.z[t], cache.i[t], cache.f[t], cache.o[t], cache.g[t] = z, i, f, o, g
        cache.c_prev[t] = c
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        cache.c[t], cache.tanh_c[t] = c, tanh_c
    return h, cache


def _lstm_backward_batch(cache: LstmCache, p: LstmParams, d_h_last: np.ndarray) -> Params:
    """BPTT for gradients of all gate parameters, upstream on the final hidden."""
    t_len, batch, hidden = cache.i.shape
    w, _ = _stack(p)
    dw = np.zeros_like(w)
    db = np.zeros(4 * hidden)
    dh = d_h_last.copy()
    dc = np.zeros((batch, hidden))
    for t in reversed(range(t_len)):
        i, f, o, g = cache.i[t], cache.f[t], cache.o[t], cache.g[t]
        tanh_c, c_prev, z = cache.tanh_c[t], cache.c_prev[t], cache.z[t]
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc = dc * f
        da = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), do * o * (1.0 - o), dg * (1.0 - g**2)],
            axis=1,
        )
        dw += da.T @ z
        db += da.sum(axis=0)
        dh = (da @ w)[:, :hidden]
    return {
        "W_i": dw[:hidden],
        "W_f": dw[hidden : 2 * hidden],
        "W_o": dw[2 * hidden : 3 * hidden],
        "W_C": dw[3 * hidden :],
        "b_i": db[:hidden],
        "b_f": db[hidden : 2 * hidden],
        "b_o": db[2 * hidden : 3 * hidden],
        "b_C": db[3 * hidden :],
    }


def bilstm_forward(seq: np.ndarray, p_fwd: LstmParams, p_bwd: LstmParams) -> np.ndarray:
    """T x 2H outputs: forward states beside time-aligned backward states."""
    seq = np.asarray(seq, dtype=np.float64)
    fwd_states, _ = lstm_forward(seq, p_fwd)
    bwd_states, _ = lstm_forward(seq[::-1], p_bwd)
    fwd = np.stack([s.h for s in fwd_states])
    bwd = np.stack([s.h for s in bwd_states])[::-1]
    return np.concatenate([fwd, bwd], axis=1)


# ---------------------------------------------------------------------------
# Convolution


def conv2d(x: np.ndarray, w: np.ndarray, b: float = 0.0) -> np.ndarray:
    """Valid, stride-1 cross-correlation: f[i,j] = sum x[i+m, j+n] w[m,n] + b."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    kh, kw = w.shape
    if kh > x.shape[0] or kw > x.shape[1]:
        raise KernelTooLarge(f"kernel {w.shape} does not fit in input {x.shape}")
    windows = np.lib.stride_tricks.sliding_window_view(x, (kh, kw))
    return np.tensordot(windows, w, axes=([2, 3], [0, 1])) + b


def _conv_forward_batch(x: np.ndarray, conv_w: np.ndarray, conv_b: np.ndarray):
    """x: B x T x D, conv_w: F x k x k -> (pooled B x F, cache)."""
    k = conv_w.shape[1]
    if x.shape[1] < k or x.shape[2] < k:
        raise KernelTooLarge(f"kernel {k}x{k} does not fit in input {x.shape[1:]}")
    windows = np.lib.stride_tricks.sliding_window_view(x, (k, k), axis=(1, 2))
    conv = np.tensordot(windows, conv_w, axes=([3, 4], [1, 2])) + conv_b
    activated = np.tanh(conv)
    pooled = activated.mean(axis=(1, 2))
    return pooled, (windows, activated)


def _conv_backward_batch(cache, d_pooled: np.ndarray) -> Params:
    windows, activated = cache
    _, oh, ow, _ = activated.shape
    d_act = np.broadcast_to(d_pooled[:, None, None, :] / (oh * ow), activated.shape)
    d_conv = d_act * (1.0 - activated**2)
    dw = np.tensordot(d_conv, windows, axes=([0, 1, 2], [0, 1, 2]))
    db = d_conv.sum(axis=(0, 1, 2))
    return {"conv_w": dw, "conv_b": db}


# ---------------------------------------------------------------------------
# Model-level API


_LSTM_KEYS = ("W_i", "W_f", "W_o", "W_C", "b_i", "b_f", "b_o", "b_C")


def _init_lstm(rng: np.random.Generator, hidden: int, input_dim: int, prefix: str = "") -> Params:
    scale = 1.0 / np.sqrt(hidden + input_dim)
    params: Params = {}
    for gate in ("i", "f", "o", "C"):
        params[f"{prefix}W_{gate}"] = rng.uniform(-scale, scale, size=(hidden, hidden + input_dim))
    for gate in ("i", "f", "o", "C"):
        # forget bias 1.0 stabilizes early BPTT
        params[f"{prefix}b_{gate}"] = np.full(hidden, 1.0) if gate == "f" else np.zeros(hidden)
    return params


def init_params(spec: ModelSpec, input_dim: int) -> Params:
    """Seeded uniform(-1/sqrt(fan_in), +) weights, zero biases, forget bias 1."""
    if input_dim < 1:
        raise ShapeMismatch("input_dim must be >= 1")
    rng = np.random.default_rng(spec.init_seed)
    params: Params = {}
    if spec.kind is ModelKind.LSTM:
        params.update(_init_lstm(rng, spec.hidden, input_dim))
        head_in = spec.hidden
    elif spec.kind is ModelKind.BILSTM:
        params.update(_init_lstm(rng, spec.hidden, input_dim, prefix="fwd_"))
        params.update(_init_lstm(rng, spec.hidden, input_dim, prefix="bwd_"))
        head_in = 2 * spec.hidden
    else:
        scale = 1.0 / CONV_KERNEL  # 1/sqrt(k*k)
        params["conv_w"] = rng.uniform(
            -scale, scale, size=(N_CONV_FILTERS, CONV_KERNEL, CONV_KERNEL)
        )
        params["conv_b"] = np.zeros(N_CONV_FILTERS)
        head_in = N_CONV_FILTERS
    params["head_w"] = rng.uniform(-1.0, 1.0, size=head_in) / np.sqrt(head_in)
    params["head_b"] = np.zeros(1)
    return params


def _lstm_params_view(params: Params, prefix: str = "") -> LstmParams:
    return LstmParams(**{k: params[prefix + k] for k in _LSTM_KEYS})


def _as_matrix(x) -> np.ndarray:
    frames = getattr(x, "frames", x)
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ShapeMismatch(f"model input must be T x D, got shape {frames.shape}")
    return frames


def forward_batch(spec: ModelSpec, params: Params, x: np.ndarray):
    """Probabilities for a batch x of shape B x T x D, plus a backward cache."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch(f"batch input must be B x T x D, got {x.shape}")
    caches: dict = {}
    if spec.kind is ModelKind.LSTM:
        p = _lstm_params_view(params)
        readout, caches["lstm"] = _lstm_forward_batch(np.swapaxes(x, 0, 1), p)
    elif spec.kind is ModelKind.BILSTM:
        p_fwd = _lstm_params_view(params, "fwd_")
        p_bwd = _lstm_params_view(params, "bwd_")
        h_fwd, caches["fwd"] = _lstm_forward_batch(np.swapaxes(x, 0, 1), p_fwd)
        h_bwd, caches["bwd"] = _lstm_forward_batch(np.swapaxes(x, 0, 1)[::-1], p_bwd)
        readout = np.concatenate([h_fwd, h_bwd], axis=1)
    else:
        readout, caches["conv"] = _conv_forward_batch(x, params["conv_w"], params["conv_b"])
    if readout.shape[1] != params["head_w"].shape[0]:
        raise ShapeMismatch(
            f"readout width {readout.shape[1]} != head width {params['head_w'].shape[0]}"
        )
    logits = readout @ params["head_w"] + params["head_b"][0]
    probs = sigmoid(logits)
    caches["readout"] = readout
    caches["probs"] = probs
    return probs, caches


def backward_batch(spec: ModelSpec, params: Params, caches: dict, upstream: np.ndarray) -> Params:
    """Parameter gradients of sum_b upstream[b] * output_b."""
    probs, readout = caches["probs"], caches["readout"]
    d_logit = upstream * probs * (1.0 - probs)
    grads: Params = {
        "head_w": readout.T @ d_logit,
        "head_b": np.array([d_logit.sum()]),
    }
    d_readout = np.outer(d_logit, params["head_w"])
    hidden = spec.hidden
    if spec.kind is ModelKind.LSTM:
        grads.update(_lstm_backward_batch(caches["lstm"], _lstm_params_view(params), d_readout))
    elif spec.kind is ModelKind.BILSTM:
        fwd = _lstm_backward_batch(
            caches["fwd"], _lstm_params_view(params, "fwd_"), d_readout[:, :hidden]
        )
        bwd = _lstm_backward_batch(
            caches["bwd"], _lstm_params_view(params, "bwd_"), d_readout[:, hidden:]
        )
        grads.update({f"fwd_{k}": v for k, v in fwd.items()})
        grads.update({f"bwd_{k}": v for k, v in bwd.items()})
    else:
        grads.update(_conv_backward_batch(caches["conv"], d_readout))
    return grads


def forward(spec: ModelSpec, params: Params, x) -> float:
    """Scalar probability in (0, 1) for a single T x D input."""
    probs, _ = forward_batch(spec, params, _as_matrix(x)[None])
    return float(probs[0])


def backward(spec: ModelSpec, params: Params, x, upstream_grad: float = 1.0) -> Params:
    """Gradients of upstream_grad * output w.r.t. every parameter."""
    probs, caches = forward_batch(spec, params, _as_matrix(x)[None])
    return backward_batch(spec, params, caches, np.array([upstream_grad]))


# ---------------------------------------------------------------------------
# Gradient checking


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    eps: float
    per_param: dict[str, float] = field(default_factory=dict)


def gradient_check(
    spec: ModelSpec,
    params: Params,
    x,
    eps: float = 1e-4,
    grads: Params | None = None,
) -> GradCheckReport:
    """Compare analytic gradients to central finite differences per parameter.

    Relative error per entry is |a - n| / max(|a|, |n|, 1e-12).  A grads
    argument substitutes for the analytic side (detector-sanity testing).
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    x = _as_matrix(x)
    if grads is None:
        grads = backward(spec, params, x, 1.0)

    max_err, worst = 0.0, ""
    per_param: dict[str, float] = {}
    for key in sorted(params):
        theta = params[key]
        param_err = 0.0
        for idx in range(theta.size):
            original = theta.flat[idx]
            theta.flat[idx] = original + eps
            f_plus = forward(spec, params, x)
            theta.flat[idx] = original - eps
            f_minus = forward(spec, params, x)
            theta.flat[idx] = original
            numeric = (f_plus - f_minus) / (2.0 * eps)
            analytic = grads[key].flat[idx]
            err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-12)
            if err > param_err:
                param_err = err
            if err > max_err:
                max_err, worst = err, f"{key}[{idx}]"
        per_param[key] = param_err
    return GradCheckReport(max_rel_error=max_err, worst_param=worst, eps=eps, per_param=per_param)
