from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from segkit.exceptions import ShapeMismatch

DEFAULT_PATCH_SIZE = 256
DEFAULT_PATCH_STRIDE = 192


class Sample(BaseModel):
    """One 2D slice: ``H x W x channels`` image and its ``H x W`` class-index mask."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: str
    patient_id: str
    image: np.ndarray
    labels: np.ndarray
    split: Optional[str] = None

    @model_validator(mode="after")
    def validate_alignment(self) -> Sample:
        if self.image.ndim != 3 or self.labels.ndim != 2 or self.image.shape[:2] != self.labels.shape:
            raise ShapeMismatch(
                detail=f"Sample {self.id!r}: image {self.image.shape} and mask {self.labels.shape} are not aligned.",
            )
        return self

    @property
    def height(self) -> int:
        return self.image.shape[0]

    @property
    def width(self) -> int:
        return self.image.shape[1]


class PatchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: int = Field(default=DEFAULT_PATCH_SIZE, ge=1)
    stride: int = Field(default=DEFAULT_PATCH_STRIDE, ge=1)


class PatchGrid(BaseModel):
    """Top-left anchors of the overlapping ``size x size`` windows covering one image."""

    model_config = ConfigDict(frozen=True)

    image_height: int
    image_width: int
    size: int
    stride: int
    row_anchors: list[int]
    col_anchors: list[int]

    @property
    def anchors(self) -> list[tuple[int, int]]:
        return [(row, col) for row in self.row_anchors for col in self.col_anchors]

    def __len__(self) -> int:
        return len(self.row_anchors) * len(self.col_anchors)


class AugmentParams(BaseModel):
    """One geometric transform: rotation in degrees, zoom factor, shift as a fraction of each axis, flip."""

    model_config = ConfigDict(frozen=True)

    rotation: float = Field(default=0.0, ge=-20.0, le=20.0)
    zoom: float = Field(default=1.0, ge=0.5, le=1.5)
    shift_rows: float = Field(default=0.0, ge=-0.1, le=0.1)
    shift_cols: float = Field(default=0.0, ge=-0.1, le=0.1)
    hflip: bool = False

    @property
    def is_identity_affine(self) -> bool:
        return self.rotation == 0 and self.zoom == 1 and self.shift_rows == 0 and self.shift_cols == 0


class SplitCount(BaseModel):
    split: str
    patients: int
    images: int
    patches: int


class DatasetCounts(BaseModel):
    patch: PatchConfig
    splits: list[SplitCount]

    @property
    def total_images(self) -> int:
        return sum(item.images for item in self.splits)

    @property
    def total_patches(self) -> int:
        return sum(item.patches for item in self.splits)
