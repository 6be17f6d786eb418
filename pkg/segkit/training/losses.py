import numpy as np

from segkit.exceptions import ShapeMismatch
from segkit.tensor import cross_entropy

__all__ = ["correct_pixels", "cross_entropy", "pixel_accuracy"]


def correct_pixels(scores: np.ndarray, target: np.ndarray) -> int:
    """Pixels whose highest score is the one-hot target class."""
    if scores.shape != target.shape:
        raise ShapeMismatch(detail=f"Scores {scores.shape} and target {target.shape} differ in shape.")

    return int((scores.argmax(axis=-1) == target.argmax(axis=-1)).sum())


def pixel_accuracy(scores: np.ndarray, target: np.ndarray) -> float:
    pixels = scores.size // scores.shape[-1]
    return correct_pixels(scores, target) / pixels
