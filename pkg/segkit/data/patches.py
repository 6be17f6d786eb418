"""Overlapping patch extraction and overlap-averaged reconstruction."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from segkit.data.schemas import DatasetCounts, PatchConfig, PatchGrid, Sample, SplitCount
from segkit.exceptions import InvalidDimension, InvalidShape, ShapeMismatch

log = logging.getLogger(__name__)


def axis_anchors(length: int, size: int, stride: int) -> list[int]:
    """Multiples of ``stride``, the last window clamped to end exactly at ``length``."""
    return sorted(set(range(0, length - size + 1, stride)) | {length - size})


def plan_grid(height: int, width: int, size: int = 256, stride: int = 192) -> PatchGrid:
    if size > height or size > width:
        raise InvalidDimension(detail=f"Patch size {size} exceeds the {height}x{width} image.")

    if size <= 0 or stride <= 0:
        raise InvalidShape(detail=f"Patch size and stride must be positive, got {size}/{stride}.")

    return PatchGrid(
        image_height=height,
        image_width=width,
        size=size,
        stride=stride,
        row_anchors=axis_anchors(height, size, stride),
        col_anchors=axis_anchors(width, size, stride),
    )


def plan_grid_for(array: np.ndarray, config: PatchConfig) -> PatchGrid:
    return plan_grid(array.shape[0], array.shape[1], size=config.size, stride=config.stride)


def _check_frame(array: np.ndarray, grid: PatchGrid):
    if array.shape[:2] != (grid.image_height, grid.image_width):
        raise ShapeMismatch(
            detail=f"Array {array.shape[:2]} does not match the {grid.image_height}x{grid.image_width} grid.",
        )


def extract_patches(array: np.ndarray, grid: PatchGrid) -> list[np.ndarray]:
    """Windows in anchor order (row-major over the anchors). Works for images and masks alike."""
    _check_frame(array, grid)
    size = grid.size
    return [array[row : row + size, col : col + size].copy() for row, col in grid.anchors]


def reconstruct(patches: Sequence[np.ndarray], grid: PatchGrid) -> np.ndarray:
    """Each pixel is the arithmetic mean of its values over every covering patch."""
    if len(patches) != len(grid):
        raise InvalidShape(detail=f"Got {len(patches)} patches for a grid of {len(grid)} anchors.")

    first = np.asarray(patches[0])
    out = np.zeros((grid.image_height, grid.image_width, *first.shape[2:]), dtype=first.dtype)
    counts = np.zeros((grid.image_height, grid.image_width), dtype=np.int64)
    size = grid.size
    for (row, col), patch in zip(grid.anchors, patches):
        if patch.shape[:2] != (size, size):
            raise ShapeMismatch(detail=f"Patch shape {patch.shape} does not match patch size {size}.")

        window = (slice(row, row + size), slice(col, col + size))
        counts[window] += 1
        k = counts[window].reshape(size, size, *([1] * (out.ndim - 2)))
        # running mean: identical contributions reproduce the value exactly
        out[window] += ((patch - out[window]) / k).astype(out.dtype)

    return out


def membership_counts(grid: PatchGrid) -> np.ndarray:
    counts = np.zeros((grid.image_height, grid.image_width), dtype=np.int64)
    for row, col in grid.anchors:
        counts[row : row + grid.size, col : col + grid.size] += 1
    return counts


def count_patches(splits: dict[str, Iterable[Sample]], config: PatchConfig) -> DatasetCounts:
    """Patients, images and patches per split."""
    rows = []
    for split, samples in splits.items():
        samples = list(samples)
        patches = sum(len(plan_grid(s.height, s.width, config.size, config.stride)) for s in samples)
        rows.append(
            SplitCount(
                split=split,
                patients=len({sample.patient_id for sample in samples}),
                images=len(samples),
                patches=patches,
            ),
        )
        log.debug("Split %s: %s images, %s patches", split, len(samples), patches)

    return DatasetCounts(patch=config, splits=rows)
