import logging
from collections.abc import Sequence

import numpy as np

from segkit.data_typing import FloatArray
from segkit.exceptions import EmptyDataset, ShapeMismatch
from segkit.metrics.iou import confusion, iou_per_class, sum_counts
from segkit.metrics.labelling import label_by_thresholds
from segkit.metrics.schemas import ClassThresholds

log = logging.getLogger(__name__)

THRESHOLD_GRID = tuple(float(value) for value in np.round(np.arange(1, 20) * 0.05, 2))
HELD_THRESHOLD = 0.5


def class_iou(
    scores: Sequence[FloatArray],
    truths: Sequence[np.ndarray],
    thresholds: ClassThresholds,
    class_id: int,
) -> float:
    """IoU of one class over a whole set labelled with ``thresholds``."""
    num_classes = thresholds.num_classes
    labelled = (label_by_thresholds(score, thresholds) for score in scores)
    counts = sum_counts(
        (confusion(labels, truth, num_classes) for labels, truth in zip(labelled, truths)),
        num_classes,
    )
    return float(iou_per_class(counts)[class_id])


def tune_thresholds(
    scores: Sequence[FloatArray],
    truths: Sequence[np.ndarray],
    grid: Sequence[float] = THRESHOLD_GRID,
) -> ClassThresholds:
    """
    Per target class, the grid threshold maximising that class's IoU while every other class is held at 0.5.

    Classes are tuned independently in one pass; ties keep the smallest threshold.
    """
    if not scores:
        msg = "Threshold tuning needs a non-empty validation set."
        raise EmptyDataset(detail=msg)

    if len(scores) != len(truths):
        raise ShapeMismatch(detail=f"Got {len(scores)} score maps for {len(truths)} masks.")

    num_classes = scores[0].shape[-1]
    held = ClassThresholds.uniform(num_classes, HELD_THRESHOLD)
    tuned = []
    for class_id in range(1, num_classes):
        best_value, best_iou = grid[0], -1.0
        for value in grid:
            iou = class_iou(scores, truths, held.replace(class_id, value), class_id)
            if iou > best_iou:
                best_value, best_iou = value, iou
        tuned.append(best_value)
        log.debug("Class %s: threshold %.2f, IoU %.4f", class_id, best_value, best_iou)

    log.info("Tuned thresholds on %s images: %s", len(scores), tuned)
    return ClassThresholds(num_classes=num_classes, values=tuned)
