"""Binary PGM (P5, maxval 255) label maps; each pixel byte is a class index."""

import logging
import re
from pathlib import Path

import numpy as np

from segkit.exceptions import MaskFormatError, MissingArtifact

log = logging.getLogger(__name__)

MAXVAL = 255
# magic, width, height and maxval separated by whitespace, then exactly one whitespace byte
HEADER_PATTERN = re.compile(rb"\AP5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def dumps(labels: np.ndarray) -> bytes:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise MaskFormatError(detail=f"PGM stores 2D label maps, got shape {labels.shape}.")

    if labels.size and (labels.min() < 0 or labels.max() > MAXVAL):
        raise MaskFormatError(detail=f"Class indices must lie in [0, {MAXVAL}].")

    height, width = labels.shape
    return f"P5\n{width} {height}\n{MAXVAL}\n".encode("ascii") + labels.astype(np.uint8).tobytes()


def loads(payload: bytes) -> np.ndarray:
    match = HEADER_PATTERN.match(payload)
    if match is None:
        msg = "Not a binary PGM (P5) file."
        raise MaskFormatError(detail=msg)

    width, height, maxval = (int(group) for group in match.groups())
    if maxval != MAXVAL:
        raise MaskFormatError(detail=f"PGM maxval must be {MAXVAL}, got {maxval}.")

    body = payload[match.end() :]
    if len(body) != width * height:
        raise MaskFormatError(detail=f"PGM body holds {len(body)} bytes, expected {width * height}.")

    return np.frombuffer(body, dtype=np.uint8).reshape(height, width).astype(np.int64)


def write_pgm(labels: np.ndarray, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(labels))
    log.debug("Wrote %s", path)
    return path


def read_pgm(path: Path) -> np.ndarray:
    if not path.is_file():
        msg = f"Mask file {str(path)!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    return loads(path.read_bytes())
