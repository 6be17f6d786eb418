"""
TSR1 tensor container.

Layout: magic ``TSR1``, one byte rank (always 3), three little-endian uint32 dims ``H, W, C``, then ``H*W*C``
little-endian float32 values in row-major order (H outer, C inner).
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from segkit.exceptions import MissingArtifact, NumericalError, TensorFormatError
from segkit.tensor import Tensor

log = logging.getLogger(__name__)

MAGIC = b"TSR1"
RANK = 3
HEADER = struct.Struct("<4sB3I")
PAYLOAD_DTYPE = np.dtype("<f4")


def dumps(array: Union[np.ndarray, Tensor]) -> bytes:
    if isinstance(array, Tensor):
        array = array.data

    array = np.asarray(array)
    if array.ndim != RANK:
        raise TensorFormatError(detail=f"TSR1 stores rank-3 tensors, got shape {array.shape}.")

    if not np.isfinite(array).all():
        msg = "TSR1 payload must be finite."
        raise NumericalError(detail=msg)

    return HEADER.pack(MAGIC, RANK, *array.shape) + np.ascontiguousarray(array, dtype=PAYLOAD_DTYPE).tobytes()


def loads(payload: bytes) -> np.ndarray:
    if len(payload) < HEADER.size:
        raise TensorFormatError(detail=f"Truncated TSR1 header: {len(payload)} bytes.")

    magic, rank, height, width, channels = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise TensorFormatError(detail=f"Bad TSR1 magic {magic!r}.")

    if rank != RANK:
        raise TensorFormatError(detail=f"TSR1 rank must be {RANK}, got {rank}.")

    expected = HEADER.size + height * width * channels * PAYLOAD_DTYPE.itemsize
    if len(payload) != expected:
        raise TensorFormatError(detail=f"TSR1 payload holds {len(payload)} bytes, the header implies {expected}.")

    values = np.frombuffer(payload, dtype=PAYLOAD_DTYPE, offset=HEADER.size)
    return values.reshape(height, width, channels).astype(np.float32)


def write_tsr(array: Union[np.ndarray, Tensor], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(array))
    log.debug("Wrote %s", path)
    return path


def read_tsr(path: Path) -> np.ndarray:
    if not path.is_file():
        msg = f"Tensor file {str(path)!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    try:
        return loads(path.read_bytes())
    except TensorFormatError as ex:
        raise TensorFormatError(detail=f"{str(path)!r}: {ex.detail}") from ex


def load_tensor(path: Path, requires_grad: bool = False) -> Tensor:
    return Tensor(read_tsr(path), requires_grad=requires_grad)
