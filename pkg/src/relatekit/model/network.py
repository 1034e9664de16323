"""Bidirectional LSTM regressor over frame features, with exact gradients.

The input to the recurrence at every frame is the audio feature column
stacked with the listener embedding row and the text vector, both repeated
along time. Per-frame BLSTM outputs pass through a Linear-ReLU-Linear head
and are mean-pooled into one utterance-level score.

Everything runs in float64 so analytic gradients can be validated against
central finite differences to tight tolerances.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError
from .config import ModelConfig, TrainConfig
from .losses import total_loss_and_grad

GATES = ("i", "f", "g", "o")
DIRECTIONS = ("fw", "bw")


def param_names(c) -> list[str]:
    """Parameter tensor names in their fixed declaration order."""
    names = ["emb"]
    for d in DIRECTIONS:
        for g in GATES:
            names.extend([f"{d}_W{g}", f"{d}_U{g}", f"{d}_b{g}"])
    names.extend(["W1", "b1", "W2", "b2"])
    return names


def param_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    if cfg.num_listeners is None:
        raise NumericError("ModelConfig.num_listeners must be set before building params")
    shapes: dict[str, tuple[int, ...]] = {"emb": (cfg.num_listeners + 1, cfg.C)}
    for d in DIRECTIONS:
        for g in GATES:
            shapes[f"{d}_W{g}"] = (cfg.input_dim, cfg.H)
            shapes[f"{d}_U{g}"] = (cfg.H, cfg.H)
            shapes[f"{d}_b{g}"] = (cfg.H,)
    shapes["W1"] = (2 * cfg.H, cfg.H2)
    shapes["b1"] = (cfg.H2,)
    shapes["W2"] = (cfg.H2, 1)
    shapes["b2"] = (1,)
    return shapes


def init_params(cfg: ModelConfig) -> dict[str, np.ndarray]:
    """Uniform(-1/sqrt(fan_in)) weights; zero biases and listener embeddings."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(cfg).items():
        if name == "emb" or name.endswith(("b1", "b2")) or "_b" in name:
            params[name] = np.zeros(shape)
        else:
            fan_in = shape[0]
            k = 1.0 / np.sqrt(fan_in)
            params[name] = rng.uniform(-k, k, size=shape)
    return params


def zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.items()}


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def assemble_inputs(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    audio: list[np.ndarray],
    text: list[np.ndarray],
    listener_idx: np.ndarray,
) -> np.ndarray:
    """Stack per-example (F x T) audio with the listener row and text vector.

    All examples in a batch must share T (batches are length-bucketed).
    Returns M with shape (B, F + C + D, T).
    """
    b = len(audio)
    t_len = audio[0].shape[1]
    m = np.zeros((b, cfg.input_dim, t_len))
    emb = params["emb"]
    for i in range(b):
        v = audio[i]
        o = text[i]
        if v.shape != (cfg.F, t_len):
            raise NumericError(
                f"audio features must be ({cfg.F}, {t_len}), got {v.shape}"
            )
        if o.shape != (cfg.D,):
            raise NumericError(f"text features must be ({cfg.D},), got {o.shape}")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(o))):
            raise NumericError("non-finite feature input")
        m[i, : cfg.F, :] = v
        m[i, cfg.F : cfg.F + cfg.C, :] = emb[listener_idx[i]][:, None]
        m[i, cfg.F + cfg.C :, :] = o[:, None]
    return m


def forward_batch(
    params: dict[str, np.ndarray], cfg: ModelConfig, m: np.ndarray
) -> tuple[np.ndarray, dict]:
    """Run the BLSTM and head over a batch; returns scores (B,) and a cache."""
    b, input_dim, t_len = m.shape
    if input_dim != cfg.input_dim:
        raise NumericError(f"input dim {input_dim} != F+C+D = {cfg.input_dim}")
    h_dim = cfg.H
    cache: dict = {"m": m, "dirs": {}}

    z = np.zeros((b, 2 * h_dim, t_len))
    for d_pos, d in enumerate(DIRECTIONS):
        ts = range(t_len) if d == "fw" else range(t_len - 1, -1, -1)
        w = {g: params[f"{d}_W{g}"] for g in GATES}
        u = {g: params[f"{d}_U{g}"] for g in GATES}
        bias = {g: params[f"{d}_b{g}"] for g in GATES}
        h = np.zeros((b, h_dim))
        c = np.zeros((b, h_dim))
        steps = {}
        for t in ts:
            x = m[:, :, t]
            gate_i = _sigmoid(x @ w["i"] + h @ u["i"] + bias["i"])
            gate_f = _sigmoid(x @ w["f"] + h @ u["f"] + bias["f"])
            gate_g = np.tanh(x @ w["g"] + h @ u["g"] + bias["g"])
            gate_o = _sigmoid(x @ w["o"] + h @ u["o"] + bias["o"])
            c_new = gate_f * c + gate_i * gate_g
            tanh_c = np.tanh(c_new)
            h_new = gate_o * tanh_c
            steps[t] = {
                "h_prev": h,
                "c_prev": c,
                "i": gate_i,
                "f": gate_f,
                "g": gate_g,
                "o": gate_o,
                "tanh_c": tanh_c,
            }
            h, c = h_new, c_new
            z[:, d_pos * h_dim : (d_pos + 1) * h_dim, t] = h_new
        cache["dirs"][d] = {"steps": steps, "order": list(ts)}

    a1 = np.einsum("bht,hk->bkt", z, params["W1"]) + params["b1"][None, :, None]
    relu = np.maximum(a1, 0.0)
    frame_out = np.einsum("bkt,ko->bot", relu, params["W2"])[:, 0, :] + params["b2"][0]
    y_hat = frame_out.mean(axis=1)
    if not np.all(np.isfinite(y_hat)):
        raise NumericError("non-finite forward output")
    cache.update({"z": z, "a1": a1, "relu": relu, "t_len": t_len})
    return y_hat, cache


def forward(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    audio: np.ndarray,
    text: np.ndarray,
    listener_idx: int = 0,
) -> tuple[float, dict]:
    """Single-example score: assemble inputs, run the batched core with B=1."""
    audio = np.asarray(audio, dtype=float)
    text = np.asarray(text, dtype=float)
    m = assemble_inputs(params, cfg, [audio], [text], np.array([listener_idx]))
    y_hat, cache = forward_batch(params, cfg, m)
    cache["listener_idx"] = np.array([listener_idx])
    return float(y_hat[0]), cache


def backward_batch(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    cache: dict,
    listener_idx: np.ndarray,
    dy: np.ndarray,
) -> dict[str, np.ndarray]:
    """Exact gradients of sum_b dy[b] * y_hat[b] for every parameter tensor."""
    m = cache["m"]
    z, a1, relu = cache["z"], cache["a1"], cache["relu"]
    b, _, t_len = m.shape
    h_dim = cfg.H
    grads = zero_grads(params)

    du = np.repeat(dy[:, None] / t_len, t_len, axis=1)  # (B, T): mean pool
    grads["W2"][:, 0] = np.einsum("bkt,bt->k", relu, du)
    grads["b2"][0] = float(du.sum())
    d_relu = params["W2"][:, 0][None, :, None] * du[:, None, :]
    d_a1 = d_relu * (a1 > 0)
    grads["W1"][:] = np.einsum("bht,bkt->hk", z, d_a1)
    grads["b1"][:] = d_a1.sum(axis=(0, 2))
    dz = np.einsum("bkt,hk->bht", d_a1, params["W1"])

    dm = np.zeros_like(m)
    for d_pos, d in enumerate(DIRECTIONS):
        steps = cache["dirs"][d]["steps"]
        order = cache["dirs"][d]["order"]
        w = {g: params[f"{d}_W{g}"] for g in GATES}
        u = {g: params[f"{d}_U{g}"] for g in GATES}
        dh_rec = np.zeros((b, h_dim))
        dc_rec = np.zeros((b, h_dim))
        for t in reversed(order):
            s = steps[t]
            dh = dz[:, d_pos * h_dim : (d_pos + 1) * h_dim, t] + dh_rec
            d_gate_o = dh * s["tanh_c"]
            dc = dc_rec + dh * s["o"] * (1.0 - s["tanh_c"] ** 2)
            d_gate_i = dc * s["g"]
            d_gate_g = dc * s["i"]
            d_gate_f = dc * s["c_prev"]
            dc_rec = dc * s["f"]
            da = {
                "i": d_gate_i * s["i"] * (1.0 - s["i"]),
                "f": d_gate_f * s["f"] * (1.0 - s["f"]),
                "g": d_gate_g * (1.0 - s["g"] ** 2),
                "o": d_gate_o * s["o"] * (1.0 - s["o"]),
            }
            x = m[:, :, t]
            dx = np.zeros_like(x)
            dh_rec = np.zeros((b, h_dim))
            for g in GATES:
                grads[f"{d}_W{g}"] += x.T @ da[g]
                grads[f"{d}_U{g}"] += s["h_prev"].T @ da[g]
                grads[f"{d}_b{g}"] += da[g].sum(axis=0)
                dx += da[g] @ w[g].T
                dh_rec += da[g] @ u[g].T
            dm[:, :, t] += dx

    d_emb_rows = dm[:, cfg.F : cfg.F + cfg.C, :].sum(axis=2)  # (B, C)
    np.add.at(grads["emb"], listener_idx, d_emb_rows)

    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in parameter '{name}'")
    return grads


def batch_loss(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    tcfg: TrainConfig,
    audio: list[np.ndarray],
    text: list[np.ndarray],
    listener_idx: np.ndarray,
    y_norm: np.ndarray,
    weights: np.ndarray,
) -> float:
    """Total training loss of one batch as a pure function of the parameters."""
    m = assemble_inputs(params, cfg, audio, text, listener_idx)
    y_hat, _ = forward_batch(params, cfg, m)
    loss, _ = total_loss_and_grad(y_hat, y_norm, weights, tcfg)
    return loss


def batch_loss_and_grads(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    tcfg: TrainConfig,
    audio: list[np.ndarray],
    text: list[np.ndarray],
    listener_idx: np.ndarray,
    y_norm: np.ndarray,
    weights: np.ndarray,
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """One batch's loss, parameter gradients, and raw predictions."""
    m = assemble_inputs(params, cfg, audio, text, listener_idx)
    y_hat, cache = forward_batch(params, cfg, m)
    loss, dy = total_loss_and_grad(y_hat, y_norm, weights, tcfg)
    grads = backward_batch(params, cfg, cache, listener_idx, dy)
    return loss, grads, y_hat
