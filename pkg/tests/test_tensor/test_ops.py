import numpy as np
import pytest

from segkit.exceptions import ChannelMismatch, InvalidDimension, InvalidShape, ShapeMismatch
from segkit.tensor import (
    ConvKernel,
    Tensor,
    add_elementwise,
    average,
    batchnorm,
    concat_channels,
    conv2d,
    cross_entropy,
    maxpool2d,
    multiply,
    relu,
    softmax_channelwise,
    sum_all,
    transposed_conv2d,
    upsample_nearest2x,
)
from tests.common import naive_conv2d, naive_maxpool2d, naive_transposed_conv2d


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


def kernel(rng: np.random.Generator, size: int, in_channels: int, out_channels: int) -> ConvKernel:
    return ConvKernel(
        Tensor(rng.standard_normal((size, size, in_channels, out_channels))),
        Tensor(rng.standard_normal(out_channels)),
    )


class TestTensor:
    def test_from_values_is_row_major_channels_innermost(self):
        tensor = Tensor.from_values(2, 2, 2, [1, 2, 3, 4, 5, 6, 7, 8])

        assert tensor.shape == (2, 2, 2)
        assert tensor.data[0, 1].tolist() == [3, 4]
        assert tensor.values() == [1, 2, 3, 4, 5, 6, 7, 8]

    def test_from_values_length_mismatch(self):
        with pytest.raises(InvalidShape):
            Tensor.from_values(2, 2, 1, [1, 2, 3])

    def test_zero_dimension_rejected(self):
        with pytest.raises(InvalidShape):
            Tensor(np.zeros((0, 3, 1)))

    def test_integer_data_becomes_float(self):
        assert Tensor(np.ones((1, 1, 1), dtype=np.int64)).dtype == np.float32


class TestConvolution:
    @pytest.mark.parametrize("size", [1, 3, 5, 7])
    def test_conv2d_matches_naive(self, rng, size):
        x = rng.standard_normal((6, 5, 3))
        conv_kernel = kernel(rng, size, 3, 4)

        out = conv2d(Tensor(x), conv_kernel)

        expected = naive_conv2d(x, conv_kernel.weight.data, conv_kernel.bias.data)
        assert out.shape == (6, 5, 4)
        assert np.allclose(out.data, expected)

    def test_conv2d_batched_equals_per_image(self, rng):
        batch = rng.standard_normal((3, 4, 4, 2))
        conv_kernel = kernel(rng, 3, 2, 2)

        out = conv2d(Tensor(batch), conv_kernel)

        for index in range(3):
            assert np.allclose(out.data[index], conv2d(Tensor(batch[index]), conv_kernel).data)

    def test_conv2d_channel_mismatch(self, rng):
        with pytest.raises(ChannelMismatch):
            conv2d(Tensor(rng.standard_normal((4, 4, 2))), kernel(rng, 3, 3, 1))

    def test_transposed_conv2d_matches_naive(self, rng):
        x = rng.standard_normal((3, 4, 2))
        conv_kernel = kernel(rng, 2, 2, 3)

        out = transposed_conv2d(Tensor(x), conv_kernel)

        assert out.shape == (6, 8, 3)
        assert np.allclose(out.data, naive_transposed_conv2d(x, conv_kernel.weight.data, conv_kernel.bias.data))

    def test_transposed_conv2d_needs_2x2_kernel(self, rng):
        with pytest.raises(InvalidShape):
            transposed_conv2d(Tensor(rng.standard_normal((2, 2, 2))), kernel(rng, 3, 2, 2))

    def test_kernel_bias_shape_checked(self, rng):
        with pytest.raises(InvalidShape):
            ConvKernel(Tensor(rng.standard_normal((3, 3, 2, 4))), Tensor(np.zeros(3)))


class TestPoolingAndResampling:
    def test_maxpool_matches_naive(self, rng):
        x = rng.standard_normal((6, 4, 3))

        assert np.allclose(maxpool2d(Tensor(x)).data, naive_maxpool2d(x))

    def test_maxpool_odd_size(self, rng):
        with pytest.raises(InvalidDimension):
            maxpool2d(Tensor(rng.standard_normal((5, 4, 1))))

    def test_maxpool_gradient_routes_to_first_maximum(self):
        x = Tensor(np.ones((2, 2, 1)), requires_grad=True)

        sum_all(maxpool2d(x)).backward()

        assert x.grad[..., 0].tolist() == [[1.0, 0.0], [0.0, 0.0]]

    def test_upsample_repeats_pixels(self):
        x = Tensor.from_values(1, 2, 1, [1.0, 2.0])

        assert upsample_nearest2x(x).data[..., 0].tolist() == [[1, 1, 2, 2], [1, 1, 2, 2]]


class TestElementwise:
    def test_relu(self):
        x = Tensor.from_values(1, 3, 1, [-1.0, 0.0, 2.0])

        assert relu(x).values() == [0.0, 0.0, 2.0]

    def test_softmax_sums_to_one(self, rng):
        out = softmax_channelwise(Tensor(rng.standard_normal((4, 4, 12)) * 30))

        assert np.allclose(out.data.sum(axis=-1), 1.0)
        assert np.all(out.data >= 0)

    def test_concat_order_and_mismatch(self, rng):
        a, b = Tensor(rng.standard_normal((2, 2, 1))), Tensor(rng.standard_normal((2, 2, 3)))

        out = concat_channels([a, b])

        assert out.channels == 4
        assert np.array_equal(out.data[..., :1], a.data)
        with pytest.raises(ShapeMismatch):
            concat_channels([a, Tensor(rng.standard_normal((4, 2, 1)))])

    def test_add_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatch):
            add_elementwise(Tensor(np.ones((2, 2, 1))), Tensor(np.ones((2, 2, 2))))

    def test_multiply_broadcasts_single_channel_mask(self):
        features = Tensor(np.ones((2, 2, 3)))
        mask = Tensor(np.full((2, 2, 1), 0.5))

        assert np.allclose(multiply(features, mask).data, 0.5)

    def test_average(self):
        out = average([Tensor(np.zeros((1, 1, 2))), Tensor(np.full((1, 1, 2), 2.0))])

        assert out.values() == [1.0, 1.0]


class TestBatchNorm:
    def test_training_normalises_and_updates_running_stats(self, rng):
        x = Tensor(rng.standard_normal((2, 4, 4, 3)) * 5 + 2)
        running_mean, running_var = np.zeros(3), np.ones(3)

        out = batchnorm(x, Tensor(np.ones(3)), Tensor(np.zeros(3)), running_mean, running_var, training=True)

        assert np.allclose(out.data.mean(axis=(0, 1, 2)), 0, atol=1e-7)
        assert np.allclose(out.data.var(axis=(0, 1, 2)), 1, atol=1e-3)
        assert np.allclose(running_mean, 0.1 * x.data.mean(axis=(0, 1, 2)))

    def test_eval_uses_running_stats(self):
        x = Tensor(np.full((2, 2, 1), 3.0))

        out = batchnorm(x, Tensor(np.ones(1)), Tensor(np.zeros(1)), np.full(1, 1.0), np.full(1, 4.0), training=False)

        assert np.allclose(out.data, 1.0, atol=1e-5)


class TestCrossEntropy:
    def test_value(self):
        scores = Tensor(np.array([[[0.5, 0.5], [0.25, 0.75]]]))
        target = np.array([[[1.0, 0.0], [0.0, 1.0]]])

        loss = cross_entropy(scores, target)

        assert np.isclose(loss.item(), -(np.log(0.5) + np.log(0.75)) / 2)

    def test_zero_score_is_floored(self):
        loss = cross_entropy(Tensor(np.array([[[0.0, 1.0]]])), np.array([[[1.0, 0.0]]]))

        assert np.isfinite(loss.item())

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            cross_entropy(Tensor(np.ones((1, 1, 2))), np.ones((1, 1, 3)))
