import numpy as np
import pytest

from segkit.exceptions import ChannelMismatch, InvalidTopology, ShapeMismatch
from segkit.nn import (
    Activation,
    AttentionGate,
    ClassificationHead,
    ConvBlockU,
    ConvBlockV,
    DeepSupervisionV1,
    DeepSupervisionV2,
    DeepSupervisionV3,
    DenseBlockQ,
    MultiKernelInput,
    PReLU,
)
from segkit.tensor import Tensor, upsample_nearest2x


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(5)


def random_tensor(rng: np.random.Generator, *shape: int) -> Tensor:
    return Tensor(rng.standard_normal(shape).astype(np.float32))


class TestConvBlocks:
    def test_block_u(self, rng):
        block = ConvBlockU(2, 8, rng)

        out = block(random_tensor(rng, 8, 8, 2))

        assert out.shape == (8, 8, 8)
        assert np.all(out.data >= 0)
        assert block.parameter_count() == (9 * 2 * 8 + 8) + (9 * 8 * 8 + 8) + 2 * 8

    def test_block_v_layers(self, rng):
        block = ConvBlockV(3, 4, 3, rng)

        assert block(random_tensor(rng, 4, 4, 3)).shape == (4, 4, 4)
        assert sum(isinstance(module, PReLU) for _, module in block.named_modules()) == 3

    @pytest.mark.parametrize("layer_count", [1, 4])
    def test_block_v_layer_count(self, rng, layer_count):
        with pytest.raises(InvalidTopology):
            ConvBlockV(3, 4, layer_count, rng)

    def test_dense_block_inputs_grow(self, rng):
        block = DenseBlockQ(3, rng, width=5)
        x = random_tensor(rng, 4, 4, 3)

        inputs = block.layer_inputs(x)

        assert [item.channels for item in inputs] == [3, 8, 13]
        assert block(x).shape == (4, 4, 5)
        assert [conv.kernel.k_h for _, _, conv in block.layers] == [5, 3, 1]

    def test_multi_kernel_branch_order(self, rng):
        block = MultiKernelInput(2, 8, rng)
        x = random_tensor(rng, 8, 8, 2)

        out = block(x)

        conv1, act1 = block.branches[0]
        assert out.shape == (8, 8, 8)
        assert np.allclose(out.data[..., :2], act1(conv1(x)).data)
        assert [conv.kernel.k_h for conv, _ in block.branches] == [1, 3, 5, 7]

    def test_multi_kernel_needs_m_divisible_by_4(self, rng):
        with pytest.raises(InvalidTopology):
            MultiKernelInput(2, 6, rng)

    def test_prelu_activation_has_slope_per_channel(self, rng):
        block = ConvBlockU(2, 4, rng, activation=Activation.PRELU)

        assert block.act.slope.shape == (4,)


class TestAttentionGate:
    def test_mask_and_output(self, rng):
        gate = AttentionGate(4, 6, rng)
        encoder, decoder = random_tensor(rng, 8, 8, 4), random_tensor(rng, 4, 4, 6)

        mask = gate.mask(encoder, decoder)
        out = gate(encoder, decoder)

        assert mask.shape == (8, 8, 1)
        assert np.all((mask.data > 0) & (mask.data < 1))
        assert np.allclose(out.data, encoder.data * mask.data)

    def test_open_gate_passes_encoder_through(self, rng):
        gate = AttentionGate(4, 6, rng)
        gate.psi.kernel.weight.data[...] = 0
        gate.psi.kernel.bias.data[...] = 60
        encoder = random_tensor(rng, 8, 8, 4)

        out = gate(encoder, random_tensor(rng, 4, 4, 6))

        assert np.array_equal(out.data, encoder.data)

    def test_inner_width_defaults_to_decoder_channels(self, rng):
        gate = AttentionGate(4, 6, rng)

        assert (gate.theta.out_channels, gate.phi.out_channels, gate.psi.in_channels) == (6, 6, 6)
        assert AttentionGate(4, 6, rng, inter_channels=2).theta.out_channels == 2

    def test_resolution_mismatch(self, rng):
        gate = AttentionGate(4, 6, rng)

        with pytest.raises(ShapeMismatch):
            gate(random_tensor(rng, 8, 8, 4), random_tensor(rng, 8, 8, 6))

    def test_channel_mismatch(self, rng):
        gate = AttentionGate(4, 6, rng)

        with pytest.raises(ChannelMismatch):
            gate(random_tensor(rng, 8, 8, 3), random_tensor(rng, 4, 4, 6))


class TestDeepSupervision:
    def test_v1_recursion(self, rng):
        channels = [2, 3, 4, 5, 6]
        block = DeepSupervisionV1(channels, 3, rng)
        feats = [random_tensor(rng, 16 >> level, 16 >> level, c) for level, c in enumerate(channels)]

        signals = block(feats)

        assert [s.shape for s in signals] == [(16 >> level, 16 >> level, 3) for level in range(5)]
        expected = block.convs[3](feats[3]).data + upsample_nearest2x(signals[4]).data
        assert np.allclose(signals[3].data, expected)

    def test_v2_recursion(self, rng):
        channels = [2, 3, 4, 5]
        block = DeepSupervisionV2(channels, 3, rng)
        feats = [random_tensor(rng, 8 >> level, 8 >> level, c) for level, c in enumerate(channels)]

        signals = block(feats)

        assert [s.shape for s in signals] == [(8 >> level, 8 >> level, 3) for level in range(4)]
        pooled = signals[0].data.reshape(4, 2, 4, 2, 3).max(axis=(1, 3))
        assert np.allclose(signals[1].data, block.convs[1](feats[1]).data + pooled)

    def test_v3_accumulates_decoder(self, rng):
        block = DeepSupervisionV3([2, 3, 4, 5, 6], rng, width=4)
        decoder = [random_tensor(rng, 16 >> level, 16 >> level, c) for level, c in enumerate([2, 3, 4, 5])]

        signals = block(decoder, random_tensor(rng, 1, 1, 6))

        assert [s.shape for s in signals] == [(16 >> level, 16 >> level, 4) for level in range(5)]

    @pytest.mark.parametrize("kind", ["v1", "v2", "v3"])
    def test_linear_in_projection_weights(self, rng, kind):
        feats = [random_tensor(rng, 16 >> level, 16 >> level, c) for level, c in enumerate([2, 3, 4, 5, 6])]
        if kind == "v1":
            block, args = DeepSupervisionV1([2, 3, 4, 5, 6], 3, rng), (feats,)
        elif kind == "v2":
            block, args = DeepSupervisionV2([2, 3, 4, 5], 3, rng), (feats[:4],)
        else:
            block, args = DeepSupervisionV3([2, 3, 4, 5, 6], rng, width=3), (feats[:4], feats[4])

        before = [signal.data.copy() for signal in block(*args)]
        for parameter in block.parameters():
            parameter.data *= 2
        after = [signal.data for signal in block(*args)]

        assert all(np.allclose(doubled, 2 * signal, atol=1e-5) for signal, doubled in zip(before, after))

    def test_level_count_checked(self, rng):
        block = DeepSupervisionV1([2, 3], 3, rng)

        with pytest.raises(ShapeMismatch):
            block([random_tensor(rng, 4, 4, 2)])


class TestClassificationHead:
    def test_scores_are_distributions(self, rng):
        head = ClassificationHead(3, 12, rng)

        scores = head(random_tensor(rng, 4, 4, 3))

        assert scores.shape == (4, 4, 12)
        assert np.allclose(scores.data.sum(axis=-1), 1.0, atol=1e-6)

    def test_needs_two_classes(self, rng):
        with pytest.raises(InvalidTopology):
            ClassificationHead(3, 1, rng)
