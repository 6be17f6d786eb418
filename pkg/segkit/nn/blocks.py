"""Convolutional blocks of the encoder and decoder branches and the multi-kernel input stage."""

from __future__ import annotations

import numpy as np

from segkit.exceptions import InvalidTopology
from segkit.nn.enums import Activation, BlockKind
from segkit.nn.layers import BatchNorm2d, Conv2d, make_activation
from segkit.nn.module import Module
from segkit.tensor import Tensor, concat_channels

DENSE_WIDTH = 64
DENSE_KERNELS = (5, 3, 1)
MULTI_KERNEL_SIZES = (1, 3, 5, 7)


class ConvBlockU(Module):
    """Two 3x3 convolutions, then batch normalisation, then the activation."""

    kind = BlockKind.U

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        rng: np.random.Generator,
        activation: Activation = Activation.RELU,
    ):
        super().__init__()
        self.out_channels = out_channels
        self.conv1 = self.add_module("conv1", Conv2d(in_channels, out_channels, 3, rng))
        self.conv2 = self.add_module("conv2", Conv2d(out_channels, out_channels, 3, rng))
        self.norm = self.add_module("norm", BatchNorm2d(out_channels))
        self.act = self.add_module("act", make_activation(activation, out_channels))

    def forward(self, x: Tensor) -> Tensor:
        return self.act(self.norm(self.conv2(self.conv1(x))))


class ConvBlockV(Module):
    """VGG16-style stage: ``layer_count`` 3x3 convolutions, each followed by the activation."""

    kind = BlockKind.V

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        layer_count: int,
        rng: np.random.Generator,
        activation: Activation = Activation.PRELU,
    ):
        super().__init__()
        if layer_count not in (2, 3):
            raise InvalidTopology(detail=f"VGG-style blocks have 2 or 3 layers, got {layer_count}.")

        self.out_channels = out_channels
        self.layers: list[tuple[Module, Module]] = []
        for index in range(layer_count):
            conv = self.add_module(f"conv{index + 1}", Conv2d(in_channels, out_channels, 3, rng))
            act = self.add_module(f"act{index + 1}", make_activation(activation, out_channels))
            self.layers.append((conv, act))
            in_channels = out_channels

    def forward(self, x: Tensor) -> Tensor:
        for conv, act in self.layers:
            x = act(conv(x))
        return x


class DenseBlockQ(Module):
    """
    Three densely connected layers with kernels 5, 3 and 1.

    Each layer is batch norm + activation + convolution. Layer 2 sees the block input and the layer-1
    output, layer 3 sees the block input and both previous outputs. Every layer emits ``width`` channels.
    """

    kind = BlockKind.Q

    def __init__(
        self,
        in_channels: int,
        rng: np.random.Generator,
        activation: Activation = Activation.RELU,
        width: int = DENSE_WIDTH,
    ):
        super().__init__()
        self.out_channels = width
        self.layers: list[tuple[Module, Module, Module]] = []
        layer_in = in_channels
        for index, kernel_size in enumerate(DENSE_KERNELS, start=1):
            norm = self.add_module(f"norm{index}", BatchNorm2d(layer_in))
            act = self.add_module(f"act{index}", make_activation(activation, layer_in))
            conv = self.add_module(f"conv{index}", Conv2d(layer_in, width, kernel_size, rng))
            self.layers.append((norm, act, conv))
            layer_in += width

    def layer_inputs(self, x: Tensor) -> list[Tensor]:
        """Inputs seen by each of the three layers, in order."""
        inputs = [x]
        features = [x]
        for norm, act, conv in self.layers[:-1]:
            features.append(conv(act(norm(inputs[-1]))))
            inputs.append(concat_channels(features))
        return inputs

    def forward(self, x: Tensor) -> Tensor:
        norm, act, conv = self.layers[-1]
        return conv(act(norm(self.layer_inputs(x)[-1])))


class MultiKernelInput(Module):
    """Four parallel branches with kernels 1, 3, 5 and 7, ``m / 4`` channels each, concatenated in that order."""

    kind = BlockKind.M

    def __init__(
        self,
        in_channels: int,
        m: int,
        rng: np.random.Generator,
        activation: Activation = Activation.RELU,
    ):
        super().__init__()
        if m % len(MULTI_KERNEL_SIZES):
            raise InvalidTopology(detail=f"Multi-kernel input needs m divisible by 4, got m={m}.", parameter="m")

        self.out_channels = m
        self.branches: list[tuple[Module, Module]] = []
        for kernel_size in MULTI_KERNEL_SIZES:
            branch_width = m // len(MULTI_KERNEL_SIZES)
            conv = self.add_module(f"conv{kernel_size}", Conv2d(in_channels, branch_width, kernel_size, rng))
            act = self.add_module(f"act{kernel_size}", make_activation(activation, branch_width))
            self.branches.append((conv, act))

    def forward(self, x: Tensor) -> Tensor:
        return concat_channels([act(conv(x)) for conv, act in self.branches])
