import logging

import numpy as np

from segkit.data_typing import FloatArray
from segkit.exceptions import InvalidShape

log = logging.getLogger(__name__)

DEGENERATE_STD = 1e-8


def zscore_normalize(image: FloatArray) -> FloatArray:
    """
    Per-channel zero mean and unit population variance; near-constant channels become zeros.

    Statistics are computed in double precision, the result keeps the input's floating type.
    """
    if image.ndim != 3:
        raise InvalidShape(detail=f"Expected an HxWxC image, got shape {image.shape}.")

    dtype = image.dtype if np.issubdtype(image.dtype, np.floating) else np.float32
    values = image.astype(np.float64)
    mean = values.mean(axis=(0, 1))
    std = values.std(axis=(0, 1))
    degenerate = std < DEGENERATE_STD
    if degenerate.any():
        log.warning("Near-constant channels %s normalised to zeros", np.flatnonzero(degenerate).tolist())

    normalized = np.where(degenerate, 0.0, (values - mean) / np.where(degenerate, 1.0, std))
    return normalized.astype(dtype)
