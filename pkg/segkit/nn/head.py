from __future__ import annotations

import numpy as np

from segkit.exceptions import InvalidTopology
from segkit.nn.enums import BlockKind
from segkit.nn.layers import Conv2d
from segkit.nn.module import Module
from segkit.tensor import Tensor, softmax_channelwise


class ClassificationHead(Module):
    """1x1 convolution to ``num_classes`` channels and a per-pixel softmax."""

    kind = BlockKind.HEAD

    def __init__(self, in_channels: int, num_classes: int, rng: np.random.Generator):
        super().__init__()
        if num_classes < 2:
            raise InvalidTopology(detail=f"Need at least 2 classes, got {num_classes}.", parameter="num_classes")

        self.num_classes = num_classes
        self.conv = self.add_module("conv", Conv2d(in_channels, num_classes, 1, rng))

    def forward(self, features: Tensor) -> Tensor:
        return softmax_channelwise(self.conv(features))
