"""Training examples: normalised image patches with their label patches."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from segkit.data.augmentation import augment, params_for
from segkit.data.masks import to_one_hot
from segkit.data.normalization import zscore_normalize
from segkit.data.patches import extract_patches, plan_grid_for
from segkit.data.schemas import PatchConfig, Sample
from segkit.exceptions import EmptyDataset

log = logging.getLogger(__name__)


class PatchSet:
    """
    Stacked ``N x P x P x C`` image patches and ``N x P x P`` label patches.

    Images are z-score normalised as a whole before the patches are cut.
    """

    def __init__(self, images: np.ndarray, labels: np.ndarray, num_classes: int):
        self.images = images
        self.labels = labels
        self.num_classes = num_classes

    def __len__(self) -> int:
        return len(self.images)

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], patch: PatchConfig, num_classes: int) -> PatchSet:
        images, labels = [], []
        for sample in samples:
            grid = plan_grid_for(sample.image, patch)
            images.extend(extract_patches(zscore_normalize(sample.image), grid))
            labels.extend(extract_patches(sample.labels, grid))

        if not images:
            msg = "No samples to cut patches from."
            raise EmptyDataset(detail=msg)

        log.debug("Cut %s patches of size %s from %s samples", len(images), patch.size, len(samples))
        return cls(np.stack(images).astype(np.float32), np.stack(labels).astype(np.int64), num_classes)

    def batch(
        self,
        indices: Sequence[int],
        seed: int = 0,
        epoch: int = 0,
        augmentation: bool = False,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Images and one-hot targets of ``indices``; augmentation depends on (seed, epoch, patch index) only."""
        images, labels = [], []
        for index in indices:
            image, label = self.images[index], self.labels[index]
            if augmentation:
                image, label = augment(image, label, params=params_for(seed, epoch, int(index)))
            images.append(image)
            labels.append(label)

        return np.stack(images), to_one_hot(np.stack(labels), self.num_classes, dtype=self.images.dtype)
