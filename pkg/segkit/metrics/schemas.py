from __future__ import annotations

from enum import Enum
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from segkit.exceptions import InternalInconsistency, InvalidConfig

SIGNIFICANCE_LEVEL = 0.05


class LabellingCriterion(str, Enum):
    """Pixel labelling: highest score (``map``) or per-class tuned thresholds (``th``)."""

    MAP = "map"
    TH = "th"


class ClassThresholds(BaseModel):
    """One threshold per target class; index ``i`` belongs to class ``i + 1``, background has none."""

    model_config = ConfigDict(frozen=True)

    num_classes: int = Field(ge=2)
    values: list[float]

    @model_validator(mode="after")
    def validate_values(self) -> ClassThresholds:
        if len(self.values) != self.num_classes - 1:
            msg = f"Expected {self.num_classes - 1} target thresholds, got {len(self.values)}."
            raise InvalidConfig(detail=msg, pointer="/values")

        if any(not 0.0 <= value <= 1.0 for value in self.values):
            msg = "Thresholds must lie in [0, 1]."
            raise InvalidConfig(detail=msg, pointer="/values")

        return self

    @classmethod
    def uniform(cls, num_classes: int, value: float = 0.5) -> ClassThresholds:
        return cls(num_classes=num_classes, values=[value] * (num_classes - 1))

    def as_array(self) -> np.ndarray:
        """Per-class thresholds with ``-inf`` for background, which is always accepted."""
        return np.array([-np.inf, *self.values], dtype=np.float64)

    def replace(self, class_id: int, value: float) -> ClassThresholds:
        values = list(self.values)
        values[class_id - 1] = value
        return ClassThresholds(num_classes=self.num_classes, values=values)


class ConfusionCounts(BaseModel):
    """
    Per class ``c``: ``correct`` = pixels of ``c`` predicted as ``c``, ``truth`` = ground-truth pixels of ``c``,
    ``predicted`` = pixels predicted as ``c``. Counts of several images add up.
    """

    model_config = ConfigDict(frozen=True)

    correct: list[int]
    truth: list[int]
    predicted: list[int]

    @model_validator(mode="after")
    def validate_counts(self) -> ConfusionCounts:
        if not len(self.correct) == len(self.truth) == len(self.predicted):
            msg = "Confusion count vectors have different lengths."
            raise InternalInconsistency(detail=msg)

        if any(m > min(t, p) for m, t, p in zip(self.correct, self.truth, self.predicted)):
            msg = "Correct pixel count exceeds the truth or predicted count."
            raise InternalInconsistency(detail=msg)

        return self

    @classmethod
    def zeros(cls, num_classes: int) -> ConfusionCounts:
        return cls(correct=[0] * num_classes, truth=[0] * num_classes, predicted=[0] * num_classes)

    @property
    def num_classes(self) -> int:
        return len(self.truth)

    @property
    def total_pixels(self) -> int:
        return sum(self.truth)

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        if other.num_classes != self.num_classes:
            msg = f"Cannot add counts over {self.num_classes} and {other.num_classes} classes."
            raise InternalInconsistency(detail=msg)

        return ConfusionCounts(
            correct=[a + b for a, b in zip(self.correct, other.correct)],
            truth=[a + b for a, b in zip(self.truth, other.truth)],
            predicted=[a + b for a, b in zip(self.predicted, other.predicted)],
        )


class ImageCounts(BaseModel):
    image_id: str
    counts: ConfusionCounts


class FoldMetrics(BaseModel):
    """Per-image counts of one model (or fold) on a test set and their total."""

    fold: str
    images: list[ImageCounts]
    totals: ConfusionCounts
    per_class: list[float]
    mean_without_background: float
    mean_with_background: float


class EvaluationReport(BaseModel):
    """Per-fold metrics and their per-class average across folds."""

    labelling: LabellingCriterion
    folds: list[FoldMetrics]
    per_class: list[float]
    mean_without_background: float
    mean_with_background: float


class WilcoxonResult(BaseModel):
    """Two-sided signed-rank test of paired per-image scores."""

    n: int
    statistic: float
    p_value: float
    method: Literal["exact", "approx"]
    alpha: float = SIGNIFICANCE_LEVEL
    mean_difference: Optional[float] = None

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha
