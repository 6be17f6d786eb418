"""
Two-sided Wilcoxon signed-rank test for paired per-image scores.

Zero differences are dropped and tied magnitudes get average ranks. Up to ``EXACT_MAX_N`` pairs the null
distribution is enumerated on doubled ranks, which keeps it exact under ties; above that the normal
approximation with continuity and tie correction is used.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.stats import norm, rankdata

from segkit.exceptions import InsufficientSamples, ShapeMismatch
from segkit.metrics.schemas import SIGNIFICANCE_LEVEL, WilcoxonResult

log = logging.getLogger(__name__)

EXACT_MAX_N = 20
MIN_NONZERO = 5


def exact_p_value(doubled_ranks: np.ndarray, doubled_statistic: int) -> float:
    """``2 * P(T <= t)`` under the null, where every rank joins the positive sum with probability 1/2."""
    total = int(doubled_ranks.sum())
    distribution = np.zeros(total + 1, dtype=np.float64)
    distribution[0] = 1.0
    for rank in doubled_ranks:
        shifted = np.zeros_like(distribution)
        shifted[rank:] = distribution[: total + 1 - rank]
        distribution = distribution + shifted

    tail = distribution[: doubled_statistic + 1].sum() / 2.0 ** len(doubled_ranks)
    return float(min(1.0, 2.0 * tail))


def approx_p_value(ranks: np.ndarray, statistic: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - (tie_counts**3 - tie_counts).sum() / 48.0
    z = max(abs(statistic - mean) - 0.5, 0.0) / np.sqrt(variance)
    return float(min(1.0, 2.0 * norm.sf(z)))


def wilcoxon_signed_rank(
    first: Sequence[float],
    second: Sequence[float],
    alpha: float = SIGNIFICANCE_LEVEL,
) -> WilcoxonResult:
    first = np.asarray(first, dtype=np.float64)
    second = np.asarray(second, dtype=np.float64)
    if first.shape != second.shape or first.ndim != 1:
        msg = f"Paired scores must be equal-length vectors, got {first.shape} and {second.shape}."
        raise ShapeMismatch(detail=msg)

    differences = first - second
    mean_difference = float(differences.mean()) if differences.size else 0.0
    differences = differences[differences != 0]
    n = len(differences)
    if n == 0:
        log.info("All paired differences are zero")
        return WilcoxonResult(
            n=0,
            statistic=0.0,
            p_value=1.0,
            method="exact",
            alpha=alpha,
            mean_difference=mean_difference,
        )

    if n < MIN_NONZERO:
        msg = f"The signed-rank test needs at least {MIN_NONZERO} non-zero differences, got {n}."
        raise InsufficientSamples(detail=msg)

    ranks = rankdata(np.abs(differences))
    positive = float(ranks[differences > 0].sum())
    negative = float(ranks[differences < 0].sum())
    statistic = min(positive, negative)
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        p_value = exact_p_value(doubled, int(round(2 * statistic)))
        method = "exact"
    else:
        log.warning("Signed-rank test on %s pairs uses the normal approximation", n)
        p_value = approx_p_value(ranks, statistic)
        method = "approx"

    log.debug("Wilcoxon: n=%s, T=%s, p=%.6f", n, statistic, p_value)
    return WilcoxonResult(
        n=n,
        statistic=statistic,
        p_value=p_value,
        method=method,
        alpha=alpha,
        mean_difference=mean_difference,
    )


def compare_runs(
    first: dict[str, float],
    second: dict[str, float],
    alpha: float = SIGNIFICANCE_LEVEL,
) -> WilcoxonResult:
    """Pair per-image scores of two runs by image id and test them."""
    shared = sorted(first.keys() & second.keys())
    if len(shared) != len(first) or len(shared) != len(second):
        log.warning("Comparing on the %s images present in both runs", len(shared))

    return wilcoxon_signed_rank([first[key] for key in shared], [second[key] for key in shared], alpha=alpha)
