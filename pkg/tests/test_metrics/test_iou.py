import numpy as np
import pytest

from segkit.data import to_one_hot
from segkit.exceptions import EmptyDataset, MaskFormatError, ShapeMismatch
from segkit.metrics import (
    ConfusionCounts,
    LabellingCriterion,
    average_folds,
    confusion,
    fold_metrics,
    iou_mean,
    iou_per_class,
    per_image_iou,
)
from tests.common import naive_confusion


def test_confusion_against_reference():
    rng = np.random.default_rng(0)
    for _ in range(200):
        prediction = rng.integers(0, 4, size=(16, 16))
        truth = rng.integers(0, 4, size=(16, 16))

        counts = confusion(prediction, truth, 4)

        assert (counts.correct, counts.truth, counts.predicted) == naive_confusion(prediction, truth, 4)


def test_confusion_accepts_one_hot_truth():
    prediction = np.array([[0, 1], [2, 2]])
    truth = np.array([[0, 1], [1, 2]])

    assert confusion(prediction, to_one_hot(truth, 3), 3) == confusion(prediction, truth, 3)


def test_iou_per_class():
    counts = ConfusionCounts(correct=[3, 1, 0], truth=[4, 2, 0], predicted=[3, 3, 0])

    assert iou_per_class(counts).tolist() == [0.75, 0.25, 1.0]


def test_means():
    assert iou_mean([0.5, 1.0, 0.0]) == 0.5
    assert iou_mean([0.5, 1.0, 0.0], include_background=True) == 0.5
    assert iou_mean([1.0, 0.5, 0.25], include_background=True) == pytest.approx(0.5833333)


def test_counts_add_up():
    first = ConfusionCounts(correct=[1, 0], truth=[2, 0], predicted=[1, 1])
    second = ConfusionCounts(correct=[0, 2], truth=[0, 3], predicted=[1, 2])

    assert first + second == ConfusionCounts(correct=[1, 2], truth=[2, 3], predicted=[2, 3])


class TestConfusionErrors:
    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            confusion(np.zeros((2, 2), dtype=int), np.zeros((2, 3), dtype=int), 2)

    def test_class_out_of_range(self):
        with pytest.raises(MaskFormatError):
            confusion(np.full((2, 2), 3), np.zeros((2, 2), dtype=int), 3)


class TestFolds:
    @pytest.fixture
    def folds(self):
        rng = np.random.default_rng(4)
        result = []
        for fold in ("fold-0", "fold-1"):
            truths = [rng.integers(0, 3, size=(8, 8)) for _ in range(3)]
            predictions = [np.where(rng.random((8, 8)) < 0.7, truth, 0) for truth in truths]
            result.append(fold_metrics(fold, ["a", "b", "c"], predictions, truths, 3))
        return result

    def test_totals_are_pixel_sums(self, folds):
        assert all(fold.totals.total_pixels == 3 * 64 for fold in folds)

    def test_fold_iou_comes_from_totals(self, folds):
        fold = folds[0]

        assert fold.per_class == iou_per_class(fold.totals).tolist()
        assert fold.mean_without_background == iou_mean(fold.per_class)

    def test_average(self, folds):
        report = average_folds(folds, LabellingCriterion.MAP)

        assert report.per_class == pytest.approx(np.mean([fold.per_class for fold in folds], axis=0).tolist())
        assert report.mean_with_background == pytest.approx(np.mean(report.per_class))

    def test_per_image_iou(self, folds):
        scores = per_image_iou(average_folds(folds, LabellingCriterion.MAP))

        assert sorted(scores) == ["a", "b", "c"]
        assert all(0.0 <= value <= 1.0 for value in scores.values())

    def test_degenerate_classes_are_logged(self, caplog):
        fold = fold_metrics("fold-0", ["a"], [np.zeros((2, 2), dtype=int)], [np.zeros((2, 2), dtype=int)], 3)

        assert fold.per_class == [1.0, 1.0, 1.0]
        assert "classes [1, 2] are absent" in caplog.text

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            fold_metrics("fold-0", [], [], [], 3)

        with pytest.raises(EmptyDataset):
            average_folds([], LabellingCriterion.MAP)
