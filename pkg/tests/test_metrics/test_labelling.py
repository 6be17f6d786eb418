import numpy as np
import pytest

from segkit.exceptions import InvalidConfig, InvalidShape
from segkit.metrics import ClassThresholds, LabellingCriterion, label_by_map, label_by_thresholds, label_scores
from tests.common import naive_threshold_labels, random_scores


def test_map_ties_go_to_lowest_class():
    scores = np.array([[[0.4, 0.4, 0.2], [0.1, 0.45, 0.45]]])

    assert label_by_map(scores).tolist() == [[0, 1]]


def test_zero_thresholds_equal_map():
    scores = random_scores(np.random.default_rng(0), 16, 16, 5)

    labels = label_by_thresholds(scores, ClassThresholds.uniform(5, 0.0))

    assert np.array_equal(labels, label_by_map(scores))


def test_unreachable_thresholds_fall_back_to_background():
    scores = random_scores(np.random.default_rng(1), 8, 8, 4)

    labels = label_by_thresholds(scores, ClassThresholds.uniform(4, 1.0))

    assert np.all(labels == 0)


def test_background_stops_the_walk():
    # class 2 passes its threshold but background outranks it
    scores = np.array([[[0.5, 0.1, 0.4]]])

    assert label_by_thresholds(scores, ClassThresholds(num_classes=3, values=[0.05, 0.3])).tolist() == [[0]]


def test_second_best_class_is_taken_when_the_best_fails():
    scores = np.array([[[0.1, 0.5, 0.4]]])

    assert label_by_thresholds(scores, ClassThresholds(num_classes=3, values=[0.6, 0.3])).tolist() == [[2]]


@pytest.mark.parametrize("seed", range(5))
def test_thresholds_against_reference(seed):
    rng = np.random.default_rng(seed)
    scores = random_scores(rng, 12, 12, 6)
    values = rng.uniform(0, 0.6, size=5).round(2).tolist()

    labels = label_by_thresholds(scores, ClassThresholds(num_classes=6, values=values))

    assert np.array_equal(labels, naive_threshold_labels(scores, values))


class TestLabelScores:
    def test_th_needs_thresholds(self):
        with pytest.raises(InvalidConfig):
            label_scores(np.zeros((2, 2, 3)), LabellingCriterion.TH)

    def test_class_count_mismatch(self):
        with pytest.raises(InvalidShape):
            label_scores(np.zeros((2, 2, 3)), LabellingCriterion.TH, ClassThresholds.uniform(4))

    def test_rank_is_checked(self):
        with pytest.raises(InvalidShape):
            label_scores(np.zeros((2, 3)))


class TestClassThresholds:
    def test_wrong_length(self):
        with pytest.raises(InvalidConfig):
            ClassThresholds(num_classes=4, values=[0.5, 0.5])

    def test_out_of_range(self):
        with pytest.raises(InvalidConfig):
            ClassThresholds(num_classes=2, values=[1.5])

    def test_replace(self):
        assert ClassThresholds.uniform(4).replace(2, 0.1).values == [0.5, 0.1, 0.5]
