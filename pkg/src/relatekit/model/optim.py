"""Adam with bias correction and the linear warmup / linear decay schedule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from .config import TrainConfig


def lr_at(step: int, cfg: TrainConfig) -> float:
    """Learning rate at a (1-based) micro-step: rise to lr0, then decay to 0."""
    if not 0 <= step <= cfg.total_steps:
        raise NumericError(f"step {step} outside 0..{cfg.total_steps}")
    if cfg.warmup_steps > 0 and step <= cfg.warmup_steps:
        return cfg.lr0 * step / cfg.warmup_steps
    if cfg.total_steps == cfg.warmup_steps:
        return cfg.lr0
    return cfg.lr0 * (cfg.total_steps - step) / (cfg.total_steps - cfg.warmup_steps)


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0


def init_adam(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(
        m={k: np.zeros_like(p) for k, p in params.items()},
        v={k: np.zeros_like(p) for k, p in params.items()},
    )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    cfg: TrainConfig,
) -> None:
    """Standard bias-corrected Adam update, in place."""
    state.t += 1
    b1, b2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    for name, p in params.items():
        g = grads[name]
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        update = lr * m_hat / (np.sqrt(v_hat) + eps)
        if not np.all(np.isfinite(update)):
            raise NumericError(f"non-finite Adam update for parameter '{name}'")
        p -= update
