"""Score map to label map: highest score or per-class tuned thresholds."""

from typing import Optional

import numpy as np

from segkit.data_typing import FloatArray, LabelArray
from segkit.exceptions import InvalidConfig, InvalidShape
from segkit.metrics.schemas import ClassThresholds, LabellingCriterion

BACKGROUND = 0


def _check_scores(scores: FloatArray):
    if scores.ndim != 3:
        raise InvalidShape(detail=f"Expected an HxWxC score map, got shape {scores.shape}.")


def label_by_map(scores: FloatArray) -> LabelArray:
    """Class with the highest score; ties go to the lowest class index."""
    _check_scores(scores)
    return np.argmax(scores, axis=-1).astype(np.int64)


def label_by_thresholds(scores: FloatArray, thresholds: ClassThresholds) -> LabelArray:
    """
    Visit classes by descending score and take the first that passes its threshold.

    Background is accepted as soon as it is reached, and is the fallback when nothing passes.
    """
    _check_scores(scores)
    if scores.shape[-1] != thresholds.num_classes:
        raise InvalidShape(
            detail=f"Score map has {scores.shape[-1]} classes, thresholds cover {thresholds.num_classes}.",
        )

    # stable sort keeps the lowest class index first among equal scores
    order = np.argsort(-scores, axis=-1, kind="stable")
    accepted = scores >= thresholds.as_array()
    accepted_in_order = np.take_along_axis(accepted, order, axis=-1)
    first = np.argmax(accepted_in_order, axis=-1)
    labels = np.take_along_axis(order, first[..., None], axis=-1)[..., 0]
    return np.where(accepted_in_order.any(axis=-1), labels, BACKGROUND).astype(np.int64)


def label_scores(
    scores: FloatArray,
    criterion: LabellingCriterion = LabellingCriterion.MAP,
    thresholds: Optional[ClassThresholds] = None,
) -> LabelArray:
    if criterion == LabellingCriterion.MAP:
        return label_by_map(scores)

    if thresholds is None:
        msg = "Threshold labelling needs tuned thresholds."
        raise InvalidConfig(detail=msg, parameter="thresholds")

    return label_by_thresholds(scores, thresholds)
