import numpy as np

from segkit.data_typing import FloatArray, LabelArray
from segkit.exceptions import InvalidShape, MaskFormatError


def to_one_hot(labels: LabelArray, num_classes: int, dtype: type = np.float32) -> FloatArray:
    """``H x W`` class indices -> ``H x W x num_classes`` with exactly one active channel per pixel."""
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise MaskFormatError(
            detail=f"Class indices must lie in [0, {num_classes}), got [{labels.min()}, {labels.max()}].",
        )

    return np.eye(num_classes, dtype=dtype)[labels]


def from_one_hot(one_hot: FloatArray) -> LabelArray:
    if one_hot.ndim < 3:
        raise InvalidShape(detail=f"Expected an HxWxC one-hot mask, got shape {one_hot.shape}.")

    return one_hot.argmax(axis=-1).astype(np.int64)


def is_one_hot(mask: FloatArray) -> bool:
    return bool(np.all((mask == 0) | (mask == 1)) and np.all(mask.sum(axis=-1) == 1))
