"""Confusion counts and the per-class / mean intersection over union built on them."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from segkit.data.masks import from_one_hot
from segkit.data_typing import LabelArray
from segkit.exceptions import EmptyDataset, InternalInconsistency, MaskFormatError, ShapeMismatch
from segkit.metrics.schemas import (
    ConfusionCounts,
    EvaluationReport,
    FoldMetrics,
    ImageCounts,
    LabellingCriterion,
)

log = logging.getLogger(__name__)


def confusion(prediction: LabelArray, truth: np.ndarray, num_classes: int) -> ConfusionCounts:
    """``truth`` is a label map or a one-hot mask."""
    if truth.ndim == prediction.ndim + 1:
        truth = from_one_hot(truth)

    if prediction.shape != truth.shape:
        raise ShapeMismatch(detail=f"Prediction {prediction.shape} and truth {truth.shape} differ in shape.")

    prediction = prediction.ravel()
    truth = truth.ravel()
    for name, labels in (("prediction", prediction), ("truth", truth)):
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise MaskFormatError(detail=f"{name.capitalize()} holds class indices outside [0, {num_classes}).")

    correct = np.bincount(truth[prediction == truth], minlength=num_classes)
    return ConfusionCounts(
        correct=correct.tolist(),
        truth=np.bincount(truth, minlength=num_classes).tolist(),
        predicted=np.bincount(prediction, minlength=num_classes).tolist(),
    )


def sum_counts(counts: Iterable[ConfusionCounts], num_classes: int) -> ConfusionCounts:
    total = ConfusionCounts.zeros(num_classes)
    for item in counts:
        total = total + item
    return total


def degenerate_classes(counts: ConfusionCounts) -> list[int]:
    """Classes absent from the truth and never predicted."""
    return [c for c, (t, p) in enumerate(zip(counts.truth, counts.predicted)) if t == 0 and p == 0]


def iou_per_class(counts: ConfusionCounts) -> np.ndarray:
    """``m_cc / (t_c + m_c - m_cc)``, and 1.0 for degenerate classes."""
    correct = np.asarray(counts.correct, dtype=np.float64)
    union = np.asarray(counts.truth, dtype=np.float64) + np.asarray(counts.predicted, dtype=np.float64) - correct
    return np.divide(correct, union, out=np.ones_like(correct), where=union > 0)


def iou_mean(per_class: Sequence[float], include_background: bool = False) -> float:
    values = np.asarray(per_class, dtype=np.float64)
    return float(values.mean() if include_background else values[1:].mean())


def fold_metrics(
    fold: str,
    image_ids: Sequence[str],
    predictions: Sequence[LabelArray],
    truths: Sequence[np.ndarray],
    num_classes: int,
) -> FoldMetrics:
    if not image_ids:
        msg = f"No test images to evaluate for {fold!r}."
        raise EmptyDataset(detail=msg)

    images = [
        ImageCounts(image_id=image_id, counts=confusion(prediction, truth, num_classes))
        for image_id, prediction, truth in zip(image_ids, predictions, truths)
    ]
    totals = sum_counts((image.counts for image in images), num_classes)
    if totals.total_pixels != sum(truth.shape[0] * truth.shape[1] for truth in truths):
        msg = f"Confusion totals of {fold!r} do not cover every test pixel."
        raise InternalInconsistency(detail=msg)

    degenerate = degenerate_classes(totals)
    if degenerate:
        log.warning("%s: classes %s are absent and never predicted, IoU set to 1.0", fold, degenerate)

    per_class = iou_per_class(totals)
    return FoldMetrics(
        fold=fold,
        images=images,
        totals=totals,
        per_class=per_class.tolist(),
        mean_without_background=iou_mean(per_class),
        mean_with_background=iou_mean(per_class, include_background=True),
    )


def average_folds(folds: Sequence[FoldMetrics], labelling: LabellingCriterion) -> EvaluationReport:
    """Per-class IoU averaged across folds; the means are taken over the averaged vector."""
    if not folds:
        msg = "No folds to average."
        raise EmptyDataset(detail=msg)

    per_class = np.mean([fold.per_class for fold in folds], axis=0)
    return EvaluationReport(
        labelling=labelling,
        folds=list(folds),
        per_class=per_class.tolist(),
        mean_without_background=iou_mean(per_class),
        mean_with_background=iou_mean(per_class, include_background=True),
    )


def per_image_iou(report: EvaluationReport) -> dict[str, float]:
    """Mean target-class IoU of every test image, averaged across folds."""
    scores: dict[str, list[float]] = {}
    for fold in report.folds:
        for image in fold.images:
            scores.setdefault(image.image_id, []).append(iou_mean(iou_per_class(image.counts)))
    return {image_id: float(np.mean(values)) for image_id, values in scores.items()}
