import numpy as np
import pytest

from segkit.data import (
    AugmentParams,
    augment,
    from_one_hot,
    generate_synthetic_dataset,
    is_one_hot,
    params_for,
    to_one_hot,
    zscore_normalize,
)
from segkit.exceptions import InvalidConfig, InvalidShape, MaskFormatError, ShapeMismatch


class TestNormalization:
    def test_zero_mean_unit_variance(self):
        rng = np.random.default_rng(0)
        image = np.stack([rng.normal(5, 3, (32, 32)), rng.normal(-2, 0.5, (32, 32))], axis=-1).astype(np.float32)

        normalized = zscore_normalize(image)

        assert normalized.dtype == np.float32
        assert np.allclose(normalized.mean(axis=(0, 1)), 0, atol=1e-5)
        assert np.allclose(normalized.std(axis=(0, 1)), 1, atol=1e-4)

    def test_constant_channel_becomes_zeros(self, caplog):
        image = np.stack([np.full((8, 8), 7.0), np.arange(64.0).reshape(8, 8)], axis=-1)

        normalized = zscore_normalize(image)

        assert np.all(normalized[..., 0] == 0)
        assert "Near-constant channels [0]" in caplog.text

    def test_integer_images_become_float(self):
        assert zscore_normalize(np.arange(16).reshape(4, 4, 1)).dtype == np.float32

    def test_rank_is_checked(self):
        with pytest.raises(InvalidShape):
            zscore_normalize(np.zeros((4, 4)))


class TestMasks:
    def test_one_hot(self):
        labels = np.array([[0, 2], [1, 2]])

        one_hot = to_one_hot(labels, 3)

        assert one_hot.shape == (2, 2, 3)
        assert is_one_hot(one_hot)
        assert np.array_equal(from_one_hot(one_hot), labels)

    @pytest.mark.parametrize("labels", [np.array([[0, 3]]), np.array([[-1, 0]])])
    def test_out_of_range(self, labels):
        with pytest.raises(MaskFormatError):
            to_one_hot(labels, 3)

    def test_is_one_hot_rejects_soft_masks(self):
        assert not is_one_hot(np.full((2, 2, 2), 0.5))
        assert not is_one_hot(np.zeros((2, 2, 2)))


@pytest.fixture
def pair() -> tuple[np.ndarray, np.ndarray]:
    sample = generate_synthetic_dataset(1, 32, 32, 4, seed=11)[0]
    return sample.image, sample.labels


class TestAugmentation:
    def test_identity(self, pair):
        image, labels = pair

        out_image, out_labels = augment(image, labels, params=AugmentParams())

        assert np.array_equal(out_image, image)
        assert np.array_equal(out_labels, labels)

    def test_flip_only(self, pair):
        image, labels = pair

        out_image, out_labels = augment(image, labels, params=AugmentParams(hflip=True))

        assert np.array_equal(out_image, image[:, ::-1])
        assert np.array_equal(out_labels, labels[:, ::-1])

    def test_params_depend_only_on_seed_epoch_index(self):
        assert params_for(3, 1, 7) == params_for(3, 1, 7)
        assert params_for(3, 1, 7) != params_for(3, 2, 7)
        assert params_for(3, 1, 7) != params_for(3, 1, 8)

    def test_same_seed_same_result(self, pair):
        image, labels = pair

        first = augment(image, labels, seed=5)
        second = augment(image, labels, seed=5)

        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])

    @pytest.mark.parametrize("index", range(5))
    def test_one_hot_masks_stay_one_hot(self, pair, index):
        image, labels = pair
        one_hot = to_one_hot(labels, 4)

        out_image, out_mask = augment(image, one_hot, params=params_for(0, 0, index))

        assert out_image.shape == image.shape
        assert out_mask.shape == one_hot.shape
        assert is_one_hot(out_mask)

    def test_labels_keep_their_classes(self, pair):
        image, labels = pair

        _, out_labels = augment(image, labels, params=AugmentParams(rotation=15, zoom=0.7))

        assert set(np.unique(out_labels).tolist()) <= set(np.unique(labels).tolist())

    def test_misaligned(self, pair):
        image, labels = pair

        with pytest.raises(ShapeMismatch):
            augment(image, labels[:16])


class TestSynthetic:
    def test_deterministic(self):
        first = generate_synthetic_dataset(3, 32, 32, 4, seed=1)
        second = generate_synthetic_dataset(3, 32, 32, 4, seed=1)

        for a, b in zip(first, second):
            assert np.array_equal(a.image, b.image)
            assert np.array_equal(a.labels, b.labels)

    def test_samples(self):
        samples = generate_synthetic_dataset(5, 32, 48, 4, seed=2, num_patients=2)

        assert [sample.id for sample in samples] == ["S0000", "S0001", "S0002", "S0003", "S0004"]
        assert [sample.patient_id for sample in samples] == ["P000", "P001", "P000", "P001", "P000"]
        assert all(sample.image.shape == (32, 48, 2) and sample.image.dtype == np.float32 for sample in samples)
        assert all(set(np.unique(sample.labels).tolist()) == {0, 1, 2, 3} for sample in samples)

    def test_needs_two_classes(self):
        with pytest.raises(InvalidConfig):
            generate_synthetic_dataset(1, 16, 16, 1)
