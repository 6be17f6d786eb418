"""
Module weights as one flat TSR1 tensor (``1 x 1 x total``) plus a JSON index of names, shapes and offsets.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel

from segkit.exceptions import InvalidShape, MissingArtifact
from segkit.formats.config import read_model, write_model
from segkit.formats.tsr import read_tsr, write_tsr
from segkit.nn.module import Module

log = logging.getLogger(__name__)


class WeightsEntry(BaseModel):
    name: str
    kind: Literal["parameter", "buffer"]
    shape: list[int]
    offset: int

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))


class WeightsIndex(BaseModel):
    entries: list[WeightsEntry]

    @property
    def total(self) -> int:
        return sum(entry.size for entry in self.entries)


def index_path(weights_path: Path) -> Path:
    return weights_path.with_suffix(".json")


def flatten_state(module: Module) -> tuple[np.ndarray, WeightsIndex]:
    entries, chunks, offset = [], [], 0
    buffers = {name for name, _ in module.named_buffers()}
    for name, value in module.state_dict().items():
        entries.append(
            WeightsEntry(
                name=name,
                kind="buffer" if name in buffers else "parameter",
                shape=list(value.shape),
                offset=offset,
            ),
        )
        chunks.append(np.ravel(value))
        offset += value.size

    flat = np.concatenate(chunks) if chunks else np.zeros(0)
    return flat.astype(np.float32), WeightsIndex(entries=entries)


def unflatten_state(flat: np.ndarray, index: WeightsIndex, dtype: type = np.float32) -> dict[str, np.ndarray]:
    if flat.size != index.total:
        raise InvalidShape(detail=f"Weights hold {flat.size} values, the index describes {index.total}.")

    return {
        entry.name: flat[entry.offset : entry.offset + entry.size].reshape(entry.shape).astype(dtype)
        for entry in index.entries
    }


def save_weights(module: Module, path: Path) -> Path:
    flat, index = flatten_state(module)
    write_tsr(flat.reshape(1, 1, -1), path)
    write_model(index, index_path(path))
    log.info("Saved %s weights to %s", flat.size, path)
    return path


def read_state(path: Path, dtype: type = np.float32) -> dict[str, np.ndarray]:
    if not index_path(path).is_file():
        msg = f"Weights index {str(index_path(path))!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    index = read_model(index_path(path), WeightsIndex)
    return unflatten_state(read_tsr(path).ravel(), index, dtype=dtype)


def load_weights(module: Module, path: Path) -> Module:
    module.load_state_dict(read_state(path))
    log.debug("Loaded weights from %s", path)
    return module
