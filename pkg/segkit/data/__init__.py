"""Normalisation, patching, augmentation and synthetic data."""

from .augmentation import augment, params_for, sample_augment_params
from .masks import from_one_hot, is_one_hot, to_one_hot
from .normalization import zscore_normalize
from .patches import (
    count_patches,
    extract_patches,
    membership_counts,
    plan_grid,
    plan_grid_for,
    reconstruct,
)
from .schemas import AugmentParams, DatasetCounts, PatchConfig, PatchGrid, Sample, SplitCount
from .synthetic import generate_synthetic_dataset

__all__ = [
    "AugmentParams",
    "DatasetCounts",
    "PatchConfig",
    "PatchGrid",
    "Sample",
    "SplitCount",
    "augment",
    "count_patches",
    "extract_patches",
    "from_one_hot",
    "generate_synthetic_dataset",
    "is_one_hot",
    "membership_counts",
    "params_for",
    "plan_grid",
    "plan_grid_for",
    "reconstruct",
    "sample_augment_params",
    "zscore_normalize",
]
