"""
Synthetic two-channel slices of layered geometric shapes, used for desk-scale training and tests.

Every class has a fixed intensity signature per channel, so the task is learnable from pixel values alone.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from segkit.data.schemas import Sample
from segkit.exceptions import InvalidConfig
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)

CHANNELS = 2
NOISE_STD = 0.03
REDRAW_ATTEMPTS = 10


def class_signatures(num_classes: int, seed: int) -> np.ndarray:
    """``num_classes x 2`` mean intensities: a ramp on channel 0, a seeded permutation of it on channel 1."""
    ramp = np.arange(num_classes, dtype=np.float64) / (num_classes - 1)
    permutation = make_rng(seed, Stream.SYNTHETIC, 0).permutation(num_classes)
    return np.stack([ramp, ramp[permutation]], axis=-1)


def _draw_shape(labels: np.ndarray, class_id: int, rng: np.random.Generator):
    height, width = labels.shape
    rows, cols = np.ogrid[:height, :width]
    center_row = rng.uniform(0, height)
    center_col = rng.uniform(0, width)
    radius_row = rng.uniform(height / 16, height / 4)
    radius_col = rng.uniform(width / 16, width / 4)
    if rng.random() < 0.5:
        region = ((rows - center_row) / radius_row) ** 2 + ((cols - center_col) / radius_col) ** 2 <= 1
    else:
        region = (np.abs(rows - center_row) <= radius_row) & (np.abs(cols - center_col) <= radius_col)
    labels[region] = class_id


def _draw_square(labels: np.ndarray, class_id: int, rng: np.random.Generator):
    height, width = labels.shape
    side = max(2, min(height, width) // 8)
    row = int(rng.integers(0, height - side + 1))
    col = int(rng.integers(0, width - side + 1))
    labels[row : row + side, col : col + side] = class_id


def synthetic_labels(height: int, width: int, num_classes: int, rng: np.random.Generator) -> np.ndarray:
    labels = np.zeros((height, width), dtype=np.int64)
    for class_id in rng.permutation(np.arange(1, num_classes)):
        _draw_shape(labels, int(class_id), rng)

    # classes lost to occlusion are redrawn as small squares
    for _ in range(REDRAW_ATTEMPTS):
        missing = np.setdiff1d(np.arange(num_classes), np.unique(labels))
        if missing.size == 0:
            break
        for class_id in missing:
            _draw_square(labels, int(class_id), rng)

    return labels


def generate_synthetic_dataset(
    num_images: int,
    height: int,
    width: int,
    num_classes: int,
    seed: int = 0,
    num_patients: Optional[int] = None,
) -> list[Sample]:
    """
    Build ``num_images`` samples; patient ids are assigned round-robin over ``num_patients``
    (one patient per image by default).
    """
    if num_classes < 2:
        msg = f"Synthetic datasets need at least 2 classes, got {num_classes}."
        raise InvalidConfig(detail=msg, parameter="num_classes")

    if num_images < 0 or height < 1 or width < 1:
        msg = f"Invalid synthetic dataset size: {num_images} images of {height}x{width}."
        raise InvalidConfig(detail=msg)

    num_patients = num_patients or max(num_images, 1)
    signatures = class_signatures(num_classes, seed)
    samples = []
    for index in range(num_images):
        rng = make_rng(seed, Stream.SYNTHETIC, 1, index)
        labels = synthetic_labels(height, width, num_classes, rng)
        image = signatures[labels] + rng.normal(0.0, NOISE_STD, size=(height, width, CHANNELS))
        samples.append(
            Sample(
                id=f"S{index:04d}",
                patient_id=f"P{index % num_patients:03d}",
                image=image.astype(np.float32),
                labels=labels,
            ),
        )

    log.info("Generated %s synthetic %sx%s images with %s classes", num_images, height, width, num_classes)
    return samples
