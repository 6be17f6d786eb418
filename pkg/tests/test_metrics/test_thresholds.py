import numpy as np
import pytest

from segkit.exceptions import EmptyDataset, ShapeMismatch
from segkit.metrics import THRESHOLD_GRID, LabellingCriterion, fold_metrics, label_scores, tune_thresholds
from tests.common import naive_confusion, naive_threshold_labels, random_scores

SMALL_GRID = (0.2, 0.35, 0.5, 0.65, 0.8)


def grid_search(scores: list[np.ndarray], truths: list[np.ndarray], grid) -> list[float]:
    """Exhaustive per-class search, every other class held at 0.5, first best value kept."""
    num_classes = scores[0].shape[-1]
    best = []
    for class_id in range(1, num_classes):
        candidates = []
        for value in grid:
            thresholds = [0.5] * (num_classes - 1)
            thresholds[class_id - 1] = value
            correct = truth_total = predicted = 0
            for score, truth in zip(scores, truths):
                tallies = naive_confusion(naive_threshold_labels(score, thresholds), truth, num_classes)
                correct += tallies[0][class_id]
                truth_total += tallies[1][class_id]
                predicted += tallies[2][class_id]
            union = truth_total + predicted - correct
            candidates.append((correct / union if union else 1.0, value))
        top = max(iou for iou, _ in candidates)
        best.append(next(value for iou, value in candidates if iou == top))
    return best


def test_grid():
    assert THRESHOLD_GRID[0] == 0.05
    assert THRESHOLD_GRID[-1] == 0.95
    assert len(THRESHOLD_GRID) == 19


def test_tuning_picks_smallest_best_threshold():
    pixels = {
        # truth: (background, class 1, class 2)
        0: [0.8, 0.1, 0.1],
        1: [0.15, 0.45, 0.40],
        2: [0.05, 0.05, 0.9],
    }
    hard_background = [0.33, 0.35, 0.32]
    truth = np.array([[0, 1, 2, 0]])
    scores = np.array([[pixels[0], pixels[1], pixels[2], hard_background]])

    thresholds = tune_thresholds([scores], [truth])

    assert thresholds.values == [0.4, 0.45]


def test_empty_validation_set():
    with pytest.raises(EmptyDataset):
        tune_thresholds([], [])


def test_mismatched_inputs():
    with pytest.raises(ShapeMismatch):
        tune_thresholds([np.zeros((2, 2, 3))], [])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_tuning_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    scores = [random_scores(rng, 4, 5, 4) for _ in range(2)]
    truths = [rng.integers(0, 4, size=(4, 5)) for _ in range(2)]

    thresholds = tune_thresholds(scores, truths, SMALL_GRID)

    assert thresholds.values == grid_search(scores, truths, SMALL_GRID)


def test_flat_iou_keeps_smallest_threshold():
    # class 1 scores are far from every grid value, so its IoU does not depend on the threshold
    scores = np.array([[[0.05, 0.9, 0.05], [0.9, 0.05, 0.05], [0.05, 0.05, 0.9]]])
    truth = np.array([[1, 0, 2]])

    thresholds = tune_thresholds([scores], [truth], SMALL_GRID)

    assert thresholds.values[0] == SMALL_GRID[0]
    assert grid_search([scores], [truth], SMALL_GRID)[0] == SMALL_GRID[0]


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_two_class_tuning_never_loses_to_map(seed):
    # with one foreground class, every grid value up to 0.5 reproduces the argmax labelling
    rng = np.random.default_rng(seed)
    scores = [random_scores(rng, 6, 6, 2) for _ in range(3)]
    truths = [rng.integers(0, 2, size=(6, 6)) for _ in range(3)]
    ids = ["a", "b", "c"]

    thresholds = tune_thresholds(scores, truths)
    tuned = [label_scores(score, LabellingCriterion.TH, thresholds) for score in scores]
    argmax = [label_scores(score, LabellingCriterion.MAP) for score in scores]

    tuned_iou = fold_metrics("tuning", ids, tuned, truths, 2).per_class[1]
    assert tuned_iou >= fold_metrics("tuning", ids, argmax, truths, 2).per_class[1]
