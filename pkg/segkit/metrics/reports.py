"""CSV output of evaluation reports and per-image scores."""

from __future__ import annotations

import csv
import logging
from pathlib import Path

from segkit.exceptions import InternalInconsistency, ManifestError, MissingArtifact
from segkit.metrics.iou import degenerate_classes, iou_per_class, sum_counts
from segkit.metrics.schemas import ConfusionCounts, EvaluationReport

log = logging.getLogger(__name__)

METRICS_COLUMNS = ("fold", "image_id", "class_id", "m_cc", "t_c", "m_c", "iou", "degenerate")
PER_IMAGE_COLUMNS = ("image_id", "iou")
ALL_IMAGES = "ALL"
MEAN_FOLD = "mean"
WITHOUT_BACKGROUND = "IoU without Bg."
WITH_BACKGROUND = "IoU with Bg."


def _format(value: float) -> str:
    return f"{value:.6f}"


def _count_rows(fold: str, image_id: str, counts: ConfusionCounts) -> list[list[str]]:
    per_class = iou_per_class(counts)
    degenerate = set(degenerate_classes(counts))
    return [
        [
            fold,
            image_id,
            str(class_id),
            str(counts.correct[class_id]),
            str(counts.truth[class_id]),
            str(counts.predicted[class_id]),
            _format(per_class[class_id]),
            str(int(class_id in degenerate)),
        ]
        for class_id in range(counts.num_classes)
    ]


def metrics_rows(report: EvaluationReport) -> list[list[str]]:
    """
    Per fold: one row per (image, class), then the fold totals under image ``ALL``.
    Then the fold-averaged per-class IoU and the two mean rows, with and without background.
    """
    rows = []
    for fold in report.folds:
        total = sum_counts((image.counts for image in fold.images), fold.totals.num_classes)
        if total != fold.totals:
            msg = f"Totals of {fold.fold!r} differ from the sum of its per-image counts."
            raise InternalInconsistency(detail=msg)

        for image in fold.images:
            rows.extend(_count_rows(fold.fold, image.image_id, image.counts))
        rows.extend(_count_rows(fold.fold, ALL_IMAGES, fold.totals))

    for class_id, value in enumerate(report.per_class):
        rows.append([MEAN_FOLD, ALL_IMAGES, str(class_id), "", "", "", _format(value), ""])
    rows.append([MEAN_FOLD, ALL_IMAGES, WITHOUT_BACKGROUND, "", "", "", _format(report.mean_without_background), ""])
    rows.append([MEAN_FOLD, ALL_IMAGES, WITH_BACKGROUND, "", "", "", _format(report.mean_with_background), ""])
    return rows


def write_metrics_csv(report: EvaluationReport, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        writer.writerows(metrics_rows(report))
    log.info("Wrote metrics (%s labelling) to %s", report.labelling.value, path)
    return path


def write_per_image_csv(scores: dict[str, float], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(PER_IMAGE_COLUMNS)
        writer.writerows([image_id, _format(value)] for image_id, value in sorted(scores.items()))
    log.info("Wrote per-image IoU of %s images to %s", len(scores), path)
    return path


def read_per_image_csv(path: Path) -> dict[str, float]:
    if not path.is_file():
        msg = f"Per-image score file {str(path)!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    with path.open(newline="") as stream:
        reader = csv.DictReader(stream)
        if reader.fieldnames is None or tuple(reader.fieldnames) != PER_IMAGE_COLUMNS:
            msg = f"{str(path)!r} must have the columns {', '.join(PER_IMAGE_COLUMNS)}."
            raise ManifestError(detail=msg)

        try:
            return {row["image_id"]: float(row["iou"]) for row in reader}
        except ValueError as ex:
            raise ManifestError(detail=f"{str(path)!r}: {ex}") from ex
