"""Nonparametric tests and distribution summaries for rating data.

Production p-values come from the usual large-sample approximations (normal,
chi-square, F, studentized range); exact permutation enumeration lives in the
test suite as an oracle for tiny samples, not here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateDataError, NumericError
from .special import chi2_sf, f_sf, normal_sf, studentized_range_sf


@dataclass(frozen=True)
class TestResult:
    method: str  # MannWhitneyU | KruskalWallis | SteelDwassPair | ArtAnovaEffect
    statistic: float
    p_value: float
    group_labels: tuple[str, ...] = ()
    n_per_group: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "statistic", float(self.statistic))
        object.__setattr__(self, "p_value", float(self.p_value))
        if not np.isfinite(self.statistic):
            raise NumericError(f"{self.method}: non-finite statistic")
        if not 0.0 <= self.p_value <= 1.0:
            raise NumericError(f"{self.method}: p-value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class BoxplotSummary:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    n: int


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(pooled: np.ndarray) -> float:
    """Sum of t^3 - t over groups of tied values."""
    _, counts = np.unique(pooled, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def rank_sum_z(a: np.ndarray, b: np.ndarray, continuity: bool) -> float:
    """Standardized Mann-Whitney statistic with tie-corrected variance.

    The continuity correction (0.5 toward the mean) only applies when asked;
    the pairwise multiple-comparison procedure standardizes without it.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = len(a), len(b)
    pooled = np.concatenate([a, b])
    n = na + nb
    ranks = average_ranks(pooled)
    u = float(np.sum(ranks[:na])) - na * (na + 1) / 2.0
    mean = na * nb / 2.0
    var = na * nb / 12.0 * ((n + 1) - _tie_term(pooled) / (n * (n - 1)))
    if var <= 0.0:
        raise DegenerateDataError("all pooled values identical; rank variance is zero")
    diff = u - mean
    if continuity and diff != 0.0:
        diff -= 0.5 * np.sign(diff)
    return diff / np.sqrt(var)


def mann_whitney_u(a, b) -> TestResult:
    """Two-sided Mann-Whitney U test.

    U counts pairs where the first sample exceeds the second, plus half the
    ties; the p-value uses the normal approximation with tie-corrected
    variance and a 0.5 continuity correction.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 1 or len(b) < 1:
        raise NumericError("mann_whitney_u needs at least one value per sample")
    na, nb = len(a), len(b)
    ranks = average_ranks(np.concatenate([a, b]))
    u = float(np.sum(ranks[:na])) - na * (na + 1) / 2.0
    z = rank_sum_z(a, b, continuity=True)
    p = min(1.0, 2.0 * normal_sf(abs(z)))
    return TestResult(
        method="MannWhitneyU",
        statistic=u,
        p_value=p,
        group_labels=("a", "b"),
        n_per_group=(na, nb),
    )


def kruskal_wallis(groups, labels: tuple[str, ...] | None = None) -> TestResult:
    """Kruskal-Wallis H test with tie correction; p from chi-square (k-1 df)."""
    groups = [np.asarray(g, dtype=float) for g in groups]
    if len(groups) < 2:
        raise NumericError("kruskal_wallis needs at least two groups")
    if len(groups) == 2:
        warnings.warn(
            "kruskal_wallis called with 2 groups; mann_whitney_u is the customary test",
            stacklevel=2,
        )
    if any(len(g) == 0 for g in groups):
        raise NumericError("kruskal_wallis groups must be nonempty")
    pooled = np.concatenate(groups)
    n = len(pooled)
    ranks = average_ranks(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = float(np.sum(ranks[start : start + len(g)]))
        h += r * r / len(g)
        start += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (n**3 - n)
    if correction <= 0.0:
        raise DegenerateDataError("all values identical; Kruskal-Wallis is undefined")
    h /= correction
    h = max(h, 0.0)
    p = chi2_sf(h, len(groups) - 1)
    if labels is None:
        labels = tuple(f"g{i}" for i in range(len(groups)))
    return TestResult(
        method="KruskalWallis",
        statistic=h,
        p_value=p,
        group_labels=labels,
        n_per_group=tuple(len(g) for g in groups),
    )


def steel_dwass(groups, labels: tuple[str, ...] | None = None) -> list[TestResult]:
    """All-pairs multiple comparison by pairwise rank sums.

    Each unordered pair of groups is ranked in isolation; the standardized
    rank-sum statistic t is referred to the studentized range distribution
    with k groups and infinite degrees of freedom via P(Q >= |t| * sqrt(2)).
    """
    groups = [np.asarray(g, dtype=float) for g in groups]
    k = len(groups)
    if k < 2:
        raise NumericError("steel_dwass needs at least two groups")
    if any(len(g) == 0 for g in groups):
        raise NumericError("steel_dwass groups must be nonempty")
    if labels is None:
        labels = tuple(f"g{i}" for i in range(k))
    results = []
    for i, j in combinations(range(k), 2):
        try:
            t = rank_sum_z(groups[i], groups[j], continuity=False)
        except DegenerateDataError as exc:
            raise DegenerateDataError(
                f"degenerate pair ({labels[i]}, {labels[j]}): {exc}"
            ) from exc
        p = studentized_range_sf(abs(t) * np.sqrt(2.0), k)
        results.append(
            TestResult(
                method="SteelDwassPair",
                statistic=t,
                p_value=p,
                group_labels=(labels[i], labels[j]),
                n_per_group=(len(groups[i]), len(groups[j])),
            )
        )
    return results


# ---------------------------------------------------------------------------
# Aligned rank transform two-way ANOVA


def _as_codes(levels) -> tuple[np.ndarray, tuple[str, ...]]:
    labels = tuple(sorted({str(x) for x in levels}))
    index = {lab: i for i, lab in enumerate(labels)}
    return np.array([index[str(x)] for x in levels], dtype=int), labels


def _check_cells(a: np.ndarray, b: np.ndarray, na: int, nb: int) -> None:
    counts = np.zeros((na, nb), dtype=int)
    np.add.at(counts, (a, b), 1)
    if np.any(counts == 0):
        raise NumericError("aligned-rank ANOVA requires every factor cell to be nonempty")
    if np.any(counts == 1):
        raise NumericError(
            "aligned-rank ANOVA requires >= 2 observations per cell (no residual df)"
        )


def align_responses(y, factor_a, factor_b, effect: str) -> np.ndarray:
    """Strip every effect except the named one from the responses.

    The result is the within-cell residual plus the target effect's estimate
    from the (observation-weighted) marginal or cell means. Aligned responses
    always sum to zero.
    """
    y = np.asarray(y, dtype=float)
    a, _ = _as_codes(factor_a)
    b, _ = _as_codes(factor_b)
    grand = y.mean()
    mean_a = np.array([y[a == i].mean() for i in range(a.max() + 1)])
    mean_b = np.array([y[b == j].mean() for j in range(b.max() + 1)])
    cell = {}
    for i in range(a.max() + 1):
        for j in range(b.max() + 1):
            mask = (a == i) & (b == j)
            if mask.any():
                cell[(i, j)] = y[mask].mean()
    cell_mean = np.array([cell[(ai, bi)] for ai, bi in zip(a, b)])
    residual = y - cell_mean
    if effect == "a":
        estimate = mean_a[a] - grand
    elif effect == "b":
        estimate = mean_b[b] - grand
    elif effect == "interaction":
        estimate = cell_mean - mean_a[a] - mean_b[b] + grand
    else:
        raise ValueError(f"unknown effect {effect!r}")
    return residual + estimate


def _design(a: np.ndarray, na: int, b: np.ndarray, nb: int):
    """Effect-coded columns for A, B, and A x B (last level is the reference)."""
    n = len(a)

    def code(f: np.ndarray, nf: int) -> np.ndarray:
        cols = np.zeros((n, nf - 1))
        for lvl in range(nf - 1):
            cols[f == lvl, lvl] = 1.0
        cols[f == nf - 1, :] = -1.0
        return cols

    xa = code(a, na)
    xb = code(b, nb)
    xab = np.einsum("ni,nj->nij", xa, xb).reshape(n, -1)
    return xa, xb, xab


def _sse(x: np.ndarray, y: np.ndarray) -> float:
    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        raise NumericError("rank-deficient ANOVA design matrix")
    return float(np.sum((y - x @ beta) ** 2))


def anova_f(values, factor_a, factor_b, effect: str) -> TestResult:
    """F-test for one effect in the full two-way model, by extra sum of squares."""
    y = np.asarray(values, dtype=float)
    a, la = _as_codes(factor_a)
    b, lb = _as_codes(factor_b)
    na, nb = len(la), len(lb)
    _check_cells(a, b, na, nb)
    xa, xb, xab = _design(a, na, b, nb)
    intercept = np.ones((len(y), 1))
    full = np.hstack([intercept, xa, xb, xab])
    blocks = {"a": xa, "b": xb, "interaction": xab}
    if effect not in blocks:
        raise ValueError(f"unknown effect {effect!r}")
    reduced = np.hstack([intercept] + [blk for name, blk in blocks.items() if name != effect])
    df_effect = blocks[effect].shape[1]
    df_error = len(y) - full.shape[1]
    if df_error <= 0:
        raise NumericError("no residual degrees of freedom")
    sse_full = _sse(full, y)
    sse_reduced = _sse(reduced, y)
    if sse_full <= 0.0:
        raise DegenerateDataError("saturated fit: residual sum of squares is zero")
    f = max(0.0, (sse_reduced - sse_full) / df_effect) / (sse_full / df_error)
    return TestResult(
        method="ArtAnovaEffect",
        statistic=f,
        p_value=f_sf(f, df_effect, df_error),
        group_labels=(effect,),
        n_per_group=(len(y),),
    )


def art_anova_2x(responses, factor_a, factor_b) -> dict[str, TestResult]:
    """Aligned-rank-transform two-way ANOVA: main effects and interaction.

    Per effect: align the responses so only that effect remains, rank the
    aligned values (ties averaged), then F-test the effect in the full
    rank-response model.
    """
    y = np.asarray(responses, dtype=float)
    results = {}
    for effect in ("a", "b", "interaction"):
        aligned = align_responses(y, factor_a, factor_b, effect)
        ranked = average_ranks(aligned)
        results[effect] = anova_f(ranked, factor_a, factor_b, effect)
    return {
        "effect_a": results["a"],
        "effect_b": results["b"],
        "interaction": results["interaction"],
    }


# ---------------------------------------------------------------------------
# Boxplot summaries


def quantile_nearest_rank(sorted_values: np.ndarray, p: float) -> float:
    """Inverse empirical CDF: the smallest value covering fraction p of the data."""
    n = len(sorted_values)
    idx = int(np.ceil(p * n)) - 1
    return float(sorted_values[min(max(idx, 0), n - 1)])


def boxplot_summary(sample) -> BoxplotSummary:
    """Five-number summary with 1.5 IQR whiskers and explicit outliers.

    Quartiles use the inverse empirical CDF; the median is the usual sample
    median (midpoint of the two central values for even n).
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if n < 1:
        raise NumericError("boxplot_summary needs at least one value")
    q1 = quantile_nearest_rank(x, 0.25)
    q3 = quantile_nearest_rank(x, 0.75)
    median = float(np.median(x))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    outliers = x[(x < lo_fence) | (x > hi_fence)]
    return BoxplotSummary(
        median=median,
        q1=q1,
        q3=q3,
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
        n=n,
    )
