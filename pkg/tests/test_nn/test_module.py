import numpy as np
import pytest

from segkit.exceptions import InvalidShape, UnknownIdentifier
from segkit.nn import BatchNorm2d, ConvBlockU, Sequential
from segkit.tensor import Tensor


@pytest.fixture
def block() -> ConvBlockU:
    return ConvBlockU(2, 4, np.random.default_rng(0))


class TestModule:
    def test_parameter_and_buffer_names(self, block):
        names = [name for name, _ in block.named_parameters()]
        buffers = [name for name, _ in block.named_buffers()]

        assert names == ["conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias", "norm.gamma", "norm.beta"]
        assert buffers == ["norm.running_mean", "norm.running_var"]

    def test_state_dict_roundtrip(self, block):
        other = ConvBlockU(2, 4, np.random.default_rng(1))
        x = Tensor(np.random.default_rng(2).standard_normal((4, 4, 2)).astype(np.float32))

        other.load_state_dict(block.state_dict())

        block.eval()
        other.eval()
        assert np.array_equal(block(x).data, other(x).data)

    def test_state_dict_is_a_copy(self, block):
        state = block.state_dict()
        state["conv1.bias"][:] = 5

        assert np.all(block.conv1.kernel.bias.data == 0)

    def test_load_missing_keys(self, block):
        state = block.state_dict()
        state.pop("norm.gamma")

        with pytest.raises(UnknownIdentifier) as exc_info:
            block.load_state_dict(state)

        assert exc_info.value.detail == {"missing": ["norm.gamma"], "unexpected": []}

    def test_load_wrong_shape(self, block):
        state = block.state_dict()
        state["conv1.bias"] = np.zeros(5)

        with pytest.raises(InvalidShape):
            block.load_state_dict(state)

    def test_train_eval_propagates(self, block):
        block.eval()
        assert not any(module.training for _, module in block.named_modules())

        block.train()
        assert all(module.training for _, module in block.named_modules())

    def test_freeze(self, block):
        block.freeze()

        assert not any(parameter.requires_grad for parameter in block.parameters())

    def test_astype(self, block):
        block.astype(np.float64)

        assert all(parameter.dtype == np.float64 for parameter in block.parameters())
        assert block.norm.buffer("running_var").dtype == np.float64

    def test_sequential(self):
        model = Sequential(BatchNorm2d(2), BatchNorm2d(2))

        assert [name for name, _ in model.named_parameters()] == ["0.gamma", "0.beta", "1.gamma", "1.beta"]
        assert model(Tensor(np.ones((2, 2, 2)))).shape == (2, 2, 2)

    def test_same_seed_same_weights(self):
        first = ConvBlockU(2, 4, np.random.default_rng(9)).state_dict()
        second = ConvBlockU(2, 4, np.random.default_rng(9)).state_dict()

        assert all(np.array_equal(first[name], second[name]) for name in first)
