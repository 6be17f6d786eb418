"""
Geometric data augmentation shared by an image and its mask.

Images are resampled bilinearly, masks by nearest neighbour so they stay one-hot. Pixels mapped from
outside the frame are zero in the image and background in the mask.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy.ndimage import affine_transform

from segkit.data.masks import from_one_hot, to_one_hot
from segkit.data.schemas import AugmentParams
from segkit.exceptions import ShapeMismatch
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)

MAX_ROTATION = 20.0
ZOOM_RANGE = (0.5, 1.5)
MAX_SHIFT = 0.1


def sample_augment_params(rng: np.random.Generator) -> AugmentParams:
    return AugmentParams(
        rotation=float(rng.uniform(-MAX_ROTATION, MAX_ROTATION)),
        zoom=float(rng.uniform(*ZOOM_RANGE)),
        shift_rows=float(rng.uniform(-MAX_SHIFT, MAX_SHIFT)),
        shift_cols=float(rng.uniform(-MAX_SHIFT, MAX_SHIFT)),
        hflip=bool(rng.random() < 0.5),
    )


def params_for(seed: int, epoch: int, index: int) -> AugmentParams:
    """Parameters depend only on (seed, epoch, sample index), never on iteration order."""
    return sample_augment_params(make_rng(seed, Stream.AUGMENT, epoch, index))


def inverse_mapping(params: AugmentParams, height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Matrix and offset mapping output coordinates to input coordinates.

    The forward transform rotates and zooms about the image centre, then shifts.
    """
    theta = np.deg2rad(params.rotation)
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    center = np.array([(height - 1) / 2, (width - 1) / 2])
    shift = np.array([params.shift_rows * height, params.shift_cols * width])
    matrix = rotation.T / params.zoom
    offset = center - matrix @ (center + shift)
    return matrix, offset


def _transform_image(image: np.ndarray, matrix: np.ndarray, offset: np.ndarray) -> np.ndarray:
    channels = [
        affine_transform(image[..., channel], matrix, offset=offset, order=1, mode="constant", cval=0.0)
        for channel in range(image.shape[-1])
    ]
    return np.stack(channels, axis=-1).astype(image.dtype)


def _transform_labels(labels: np.ndarray, matrix: np.ndarray, offset: np.ndarray) -> np.ndarray:
    moved = affine_transform(labels.astype(np.float64), matrix, offset=offset, order=0, mode="constant", cval=0.0)
    return np.rint(moved).astype(labels.dtype)


def augment(
    image: np.ndarray,
    mask: np.ndarray,
    seed: Optional[int] = None,
    params: Optional[AugmentParams] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Apply one random (or the given) transform to ``image`` and ``mask``.

    ``mask`` is either ``H x W`` class indices or an ``H x W x C`` one-hot tensor; the result has the same form.
    """
    if image.shape[:2] != mask.shape[:2]:
        raise ShapeMismatch(detail=f"Image {image.shape} and mask {mask.shape} are not aligned.")

    if params is None:
        params = sample_augment_params(make_rng(seed or 0, Stream.AUGMENT))

    one_hot = mask.ndim == 3
    labels = from_one_hot(mask) if one_hot else mask
    if not params.is_identity_affine:
        matrix, offset = inverse_mapping(params, image.shape[0], image.shape[1])
        image = _transform_image(image, matrix, offset)
        labels = _transform_labels(labels, matrix, offset)

    if params.hflip:
        image = np.flip(image, axis=1).copy()
        labels = np.flip(labels, axis=1).copy()

    log.debug("Augmented with %s", params)
    if one_hot:
        return image, to_one_hot(labels, mask.shape[-1], dtype=mask.dtype)

    return image, labels
