from __future__ import annotations

import numpy as np

from segkit.nn.enums import Activation
from segkit.nn.module import Module
from segkit.tensor import (
    ConvKernel,
    Tensor,
    batchnorm,
    conv2d,
    prelu,
    relu,
    sigmoid,
    softmax_channelwise,
    transposed_conv2d,
)

PRELU_INITIAL_SLOPE = 0.25
BN_MOMENTUM = 0.9
BN_EPS = 1e-5


def he_normal(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(np.float32)


class Conv2d(Module):
    """Same-padded stride-1 convolution, He-normal weights and zero bias."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator):
        super().__init__()
        shape = (kernel_size, kernel_size, in_channels, out_channels)
        weight = self.add_parameter("weight", he_normal(rng, shape, kernel_size * kernel_size * in_channels))
        bias = self.add_parameter("bias", np.zeros(out_channels, dtype=np.float32))
        self.kernel = ConvKernel(weight, bias)

    @property
    def in_channels(self) -> int:
        return self.kernel.in_channels

    @property
    def out_channels(self) -> int:
        return self.kernel.out_channels

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.kernel)


class TransposedConv2d(Module):
    def __init__(self, in_channels: int, out_channels: int, rng: np.random.Generator):
        super().__init__()
        weight = self.add_parameter("weight", he_normal(rng, (2, 2, in_channels, out_channels), in_channels))
        bias = self.add_parameter("bias", np.zeros(out_channels, dtype=np.float32))
        self.kernel = ConvKernel(weight, bias)

    def forward(self, x: Tensor) -> Tensor:
        return transposed_conv2d(x, self.kernel)


class BatchNorm2d(Module):
    def __init__(self, channels: int):
        super().__init__()
        self.gamma = self.add_parameter("gamma", np.ones(channels, dtype=np.float32))
        self.beta = self.add_parameter("beta", np.zeros(channels, dtype=np.float32))
        self.add_buffer("running_mean", np.zeros(channels, dtype=np.float32))
        self.add_buffer("running_var", np.ones(channels, dtype=np.float32))

    def forward(self, x: Tensor) -> Tensor:
        return batchnorm(
            x,
            self.gamma,
            self.beta,
            self.buffer("running_mean"),
            self.buffer("running_var"),
            training=self.training,
            momentum=BN_MOMENTUM,
            eps=BN_EPS,
        )


class ReLU(Module):
    def forward(self, x: Tensor) -> Tensor:
        return relu(x)


class PReLU(Module):
    def __init__(self, channels: int):
        super().__init__()
        self.slope = self.add_parameter("slope", np.full(channels, PRELU_INITIAL_SLOPE, dtype=np.float32))

    def forward(self, x: Tensor) -> Tensor:
        return prelu(x, self.slope)


class Sigmoid(Module):
    def forward(self, x: Tensor) -> Tensor:
        return sigmoid(x)


class Softmax(Module):
    def forward(self, x: Tensor) -> Tensor:
        return softmax_channelwise(x)


def make_activation(kind: Activation, channels: int) -> Module:
    if kind == Activation.PRELU:
        return PReLU(channels)

    return ReLU()
