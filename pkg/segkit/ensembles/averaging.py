from collections.abc import Sequence

import numpy as np

from segkit.ensembles.schemas import AveragingMode
from segkit.exceptions import InvalidEnsemble, ShapeMismatch

SCORE_FLOOR = 1e-12


def _stack(member_scores: Sequence[np.ndarray]) -> np.ndarray:
    if not member_scores:
        msg = "Nothing to average: no member scores."
        raise InvalidEnsemble(detail=msg)

    shapes = {np.shape(scores) for scores in member_scores}
    if len(shapes) > 1:
        raise ShapeMismatch(detail=f"Member score maps differ in shape: {sorted(shapes)}.")

    return np.stack([np.asarray(scores, dtype=np.float64) for scores in member_scores])


def average_arith(member_scores: Sequence[np.ndarray]) -> np.ndarray:
    return _stack(member_scores).mean(axis=0)


def geometric_mean(member_scores: Sequence[np.ndarray]) -> np.ndarray:
    """Per-class R-th root of the product of floored member scores, before renormalisation."""
    return np.exp(np.log(np.maximum(_stack(member_scores), SCORE_FLOOR)).mean(axis=0))


def average_geo(member_scores: Sequence[np.ndarray]) -> np.ndarray:
    """Geometric mean renormalised to sum to one per pixel."""
    raw = geometric_mean(member_scores)
    return raw / raw.sum(axis=-1, keepdims=True)


def average(member_scores: Sequence[np.ndarray], mode: AveragingMode) -> np.ndarray:
    if mode == AveragingMode.GEO:
        return average_geo(member_scores)

    return average_arith(member_scores)
