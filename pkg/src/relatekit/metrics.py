"""Prediction-quality metrics: MSE plus Pearson/Spearman/Kendall correlations.

Rating data is heavily tied, so Spearman uses average ranks and Kendall is
the tie-adjusted tau-b. Correlations against a constant vector have no
defined value and are reported as None rather than silently zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import TopCategory
from .errors import NumericError
from .stats import average_ranks


@dataclass(frozen=True)
class MetricReport:
    mse: float
    lcc: float | None
    srcc: float | None
    ktau: float | None
    n: int

    def as_dict(self) -> dict:
        return {"mse": self.mse, "lcc": self.lcc, "srcc": self.srcc, "ktau": self.ktau, "n": self.n}


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if denom == 0.0:
        return None
    return float(np.sum(dx * dy) / denom)


def spearman(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation of average-ranked data."""
    return pearson(average_ranks(np.asarray(x, dtype=float)), average_ranks(np.asarray(y, dtype=float)))


def kendall_tau_b(x: np.ndarray, y: np.ndarray) -> float | None:
    """Tau-b: concordant minus discordant pairs over the tie-adjusted pair count."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(n, k=1)
    prod = sx[iu] * sy[iu]
    concordant = float(np.sum(prod > 0))
    discordant = float(np.sum(prod < 0))
    n0 = n * (n - 1) / 2.0
    tied_x = n0 - float(np.sum(sx[iu] != 0))
    tied_y = n0 - float(np.sum(sy[iu] != 0))
    denom = np.sqrt((n0 - tied_x) * (n0 - tied_y))
    if denom == 0.0:
        return None
    return float((concordant - discordant) / denom)


def evaluate(pred, truth) -> MetricReport:
    """Score predictions against ground truth with MSE, LCC, SRCC, and KTAU."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise NumericError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if len(pred) < 2:
        raise NumericError("evaluate needs at least two items")
    mse = float(np.mean((pred - truth) ** 2))
    return MetricReport(
        mse=mse,
        lcc=pearson(pred, truth),
        srcc=spearman(pred, truth),
        ktau=kendall_tau_b(pred, truth),
        n=len(pred),
    )


def per_category_srcc(
    pred, truth, categories: list[frozenset[TopCategory]]
) -> dict[TopCategory, float | None]:
    """Spearman correlation restricted to each category's items.

    An item counts toward every category it belongs to; categories with fewer
    than two items have no defined correlation and map to None.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if not (len(pred) == len(truth) == len(categories)):
        raise NumericError("pred, truth, and categories must align")
    out: dict[TopCategory, float | None] = {}
    for cat in TopCategory:
        idx = [i for i, cats in enumerate(categories) if cat in cats]
        if len(idx) < 2:
            out[cat] = None
        else:
            out[cat] = spearman(pred[idx], truth[idx])
    return out
