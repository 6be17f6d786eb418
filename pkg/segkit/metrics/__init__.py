"""Labelling, IoU, threshold tuning and paired significance tests."""

from .iou import (
    average_folds,
    confusion,
    degenerate_classes,
    fold_metrics,
    iou_mean,
    iou_per_class,
    per_image_iou,
    sum_counts,
)
from .labelling import label_by_map, label_by_thresholds, label_scores
from .reports import read_per_image_csv, write_metrics_csv, write_per_image_csv
from .schemas import (
    ClassThresholds,
    ConfusionCounts,
    EvaluationReport,
    FoldMetrics,
    ImageCounts,
    LabellingCriterion,
    WilcoxonResult,
)
from .thresholds import THRESHOLD_GRID, tune_thresholds
from .wilcoxon import compare_runs, wilcoxon_signed_rank

__all__ = [
    "THRESHOLD_GRID",
    "ClassThresholds",
    "ConfusionCounts",
    "EvaluationReport",
    "FoldMetrics",
    "ImageCounts",
    "LabellingCriterion",
    "WilcoxonResult",
    "average_folds",
    "compare_runs",
    "confusion",
    "degenerate_classes",
    "fold_metrics",
    "iou_mean",
    "iou_per_class",
    "label_by_map",
    "label_by_thresholds",
    "label_scores",
    "per_image_iou",
    "read_per_image_csv",
    "sum_counts",
    "tune_thresholds",
    "wilcoxon_signed_rank",
    "write_metrics_csv",
    "write_per_image_csv",
]
