"""Whole-image score maps from patch-wise forward passes."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from segkit.data.normalization import zscore_normalize
from segkit.data.patches import extract_patches, plan_grid_for, reconstruct
from segkit.data.schemas import PatchConfig
from segkit.tensor import Tensor, no_grad

log = logging.getLogger(__name__)

DEFAULT_INFERENCE_BATCH = 8


def infer_scores(
    scores_fn: Callable[[Tensor], Tensor],
    image: np.ndarray,
    patch: PatchConfig,
    batch_size: int = DEFAULT_INFERENCE_BATCH,
    normalize: bool = True,
) -> np.ndarray:
    """
    Normalise, cut into patches, score every patch and average overlapping scores back into an ``H x W x C`` map.

    ``scores_fn`` must already be in evaluation mode.
    """
    if normalize:
        image = zscore_normalize(image)

    grid = plan_grid_for(image, patch)
    patches = extract_patches(image, grid)
    outputs: list[np.ndarray] = []
    with no_grad():
        for start in range(0, len(patches), batch_size):
            batch = np.stack(patches[start : start + batch_size])
            outputs.extend(scores_fn(Tensor(batch)).data)

    log.debug("Scored %s patches of a %sx%s image", len(patches), image.shape[0], image.shape[1])
    return reconstruct(outputs, grid)
