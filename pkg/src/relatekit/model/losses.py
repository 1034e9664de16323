"""Training objective: class-balance-weighted clipped MSE plus contrastive loss.

Scores live on the normalized [-1, 1] scale during training. Class weights
E = (1 - beta) / (1 - beta^n) are computed from raw-score class frequencies
once before training and attached to each example.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import NumericError
from .config import TrainConfig


def class_of(y: float) -> int:
    """Score class 1..10: raw scores round up, and 0 joins class 1."""
    if not 0.0 <= y <= 10.0:
        raise NumericError(f"raw score {y} outside 0..10")
    return max(1, math.ceil(y))


def cbl_weight(n_class: int, beta_cbl: float) -> float:
    """Effective-number class weight, strictly decreasing in the class count."""
    if n_class < 1:
        raise NumericError(f"class count must be >= 1, got {n_class}")
    return (1.0 - beta_cbl) / (1.0 - beta_cbl**n_class)


def clipped_mse(y_hat: float, y_norm: float, tau: float) -> float:
    """Squared error that vanishes when the absolute error is within tau."""
    if tau < 0:
        raise NumericError("tau must be nonnegative")
    err = y_hat - y_norm
    return 0.0 if abs(err) <= tau else err * err


def contrastive_loss(y_hat_batch, y_norm_batch, alpha: float) -> float:
    """Mean hinge on pairwise prediction-difference errors beyond margin alpha."""
    y_hat = np.asarray(y_hat_batch, dtype=float)
    y = np.asarray(y_norm_batch, dtype=float)
    n = len(y_hat)
    if n < 2:
        warnings.warn("contrastive loss needs >= 2 examples; returning 0", stacklevel=2)
        return 0.0
    d = (y_hat[:, None] - y_hat[None, :]) - (y[:, None] - y[None, :])
    hinge = np.maximum(np.abs(d) - alpha, 0.0)
    pairs = n * (n - 1) / 2.0
    return float(np.sum(np.triu(hinge, k=1)) / pairs)


def total_loss(y_hat_batch, y_norm_batch, weights, cfg: TrainConfig) -> float:
    """beta * weighted clipped MSE + gamma * pairwise-weighted contrastive term."""
    loss, _ = total_loss_and_grad(y_hat_batch, y_norm_batch, weights, cfg)
    return loss


def total_loss_and_grad(
    y_hat_batch, y_norm_batch, weights, cfg: TrainConfig
) -> tuple[float, np.ndarray]:
    """Loss plus its exact gradient with respect to the predictions.

    The clip and hinge boundaries use strict inequalities, so the subgradient
    exactly at a boundary is zero.
    """
    y_hat = np.asarray(y_hat_batch, dtype=float)
    y = np.asarray(y_norm_batch, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = len(y_hat)
    if not (len(y) == n and len(w) == n):
        raise NumericError("batch arrays must have equal length")

    err = y_hat - y
    active = np.abs(err) > cfg.tau
    reg_terms = np.where(active, err * err, 0.0)
    reg = float(np.mean(w * reg_terms))
    grad = cfg.beta * w * np.where(active, 2.0 * err, 0.0) / n

    con = 0.0
    if n >= 2:
        d = (y_hat[:, None] - y_hat[None, :]) - (y[:, None] - y[None, :])
        pair_w = 0.5 * (w[:, None] + w[None, :])
        hinge_active = np.abs(d) > cfg.alpha
        hinge = np.where(hinge_active, np.abs(d) - cfg.alpha, 0.0)
        pairs = n * (n - 1) / 2.0
        con = float(np.sum(np.triu(pair_w * hinge, k=1)) / pairs)
        pair_grad = pair_w * np.sign(d) * hinge_active
        np.fill_diagonal(pair_grad, 0.0)
        grad = grad + cfg.gamma * pair_grad.sum(axis=1) / pairs

    return cfg.beta * reg + cfg.gamma * con, grad
