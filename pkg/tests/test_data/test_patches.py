import numpy as np
import pytest

from segkit.data import (
    PatchConfig,
    Sample,
    count_patches,
    extract_patches,
    membership_counts,
    plan_grid,
    reconstruct,
)
from segkit.data.patches import axis_anchors
from segkit.exceptions import InvalidDimension, InvalidShape, ShapeMismatch


@pytest.mark.parametrize(
    "length, anchors",
    [
        (256, [0]),
        (320, [0, 64]),
        (448, [0, 192]),
        (512, [0, 192, 256]),
        (640, [0, 192, 384]),
    ],
)
def test_axis_anchors(length, anchors):
    assert axis_anchors(length, 256, 192) == anchors


@pytest.mark.parametrize("shape", [(256, 256), (320, 512), (512, 512)])
def test_reconstruction_is_exact(shape):
    image = np.random.default_rng(0).standard_normal((*shape, 3)).astype(np.float32)
    grid = plan_grid(*shape)

    restored = reconstruct(extract_patches(image, grid), grid)

    assert restored.dtype == image.dtype
    assert np.array_equal(restored, image)


def test_reconstruction_of_masks():
    labels = np.random.default_rng(1).integers(0, 5, size=(64, 80))
    grid = plan_grid(64, 80, size=32, stride=24)

    assert np.array_equal(reconstruct(extract_patches(labels, grid), grid), labels)


def test_overlaps_are_averaged():
    grid = plan_grid(4, 6, size=4, stride=2)
    patches = [np.full((4, 4), 1.0), np.full((4, 4), 3.0)]

    restored = reconstruct(patches, grid)

    assert restored[:, :2].tolist() == [[1.0, 1.0]] * 4
    assert restored[:, 2:4].tolist() == [[2.0, 2.0]] * 4
    assert restored[:, 4:].tolist() == [[3.0, 3.0]] * 4


@pytest.mark.parametrize("shape", [(256, 256), (320, 320), (512, 512), (512, 320)])
def test_membership_counts(shape):
    counts = membership_counts(plan_grid(*shape))

    assert counts.min() >= 1
    assert set(np.unique(counts).tolist()) <= {1, 2, 4}


def test_patches_follow_anchor_order():
    image = np.arange(8 * 8).reshape(8, 8)
    grid = plan_grid(8, 8, size=4, stride=4)

    patches = extract_patches(image, grid)

    assert grid.anchors == [(0, 0), (0, 4), (4, 0), (4, 4)]
    assert [patch[0, 0] for patch in patches] == [0, 4, 32, 36]


class TestErrors:
    def test_patch_larger_than_image(self):
        with pytest.raises(InvalidDimension):
            plan_grid(128, 512)

    def test_non_positive_stride(self):
        with pytest.raises(InvalidShape):
            plan_grid(64, 64, size=32, stride=0)

    def test_wrong_frame(self):
        with pytest.raises(ShapeMismatch):
            extract_patches(np.zeros((64, 64)), plan_grid(64, 80, size=32, stride=24))

    def test_wrong_patch_count(self):
        grid = plan_grid(64, 64, size=32, stride=32)

        with pytest.raises(InvalidShape):
            reconstruct([np.zeros((32, 32))] * 3, grid)


def test_count_patches():
    def sample(index: int, patient: str, size: int) -> Sample:
        return Sample(
            id=f"S{index}",
            patient_id=patient,
            image=np.zeros((size, size, 2), dtype=np.float32),
            labels=np.zeros((size, size), dtype=np.int64),
        )

    counts = count_patches(
        {
            "train": [sample(0, "P0", 512), sample(1, "P0", 256), sample(2, "P1", 320)],
            "validation": [sample(3, "P2", 256)],
        },
        PatchConfig(),
    )

    assert [(row.split, row.patients, row.images, row.patches) for row in counts.splits] == [
        ("train", 2, 3, 9 + 1 + 4),
        ("validation", 1, 1, 1),
    ]
    assert counts.total_images == 4
    assert counts.total_patches == 15
