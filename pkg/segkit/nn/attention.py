from __future__ import annotations

from typing import Optional

import numpy as np

from segkit.exceptions import ChannelMismatch, ShapeMismatch
from segkit.nn.enums import BlockKind
from segkit.nn.layers import Conv2d
from segkit.nn.module import Module
from segkit.tensor import Tensor, add_elementwise, multiply, relu, sigmoid, upsample_nearest2x


class AttentionGate(Module):
    """
    Spatial sigmoid mask filtering encoder features before they reach the decoder.

    The decoder signal ``T_{n+1}`` is upsampled to the encoder resolution, both branches pass a 1x1
    convolution, are added and rectified, and a 1x1 convolution to one channel followed by a sigmoid
    yields the mask. ``S_n = C_n * mask``.
    """

    kind = BlockKind.AG

    def __init__(
        self,
        encoder_channels: int,
        decoder_channels: int,
        rng: np.random.Generator,
        inter_channels: Optional[int] = None,
    ):
        super().__init__()
        inter_channels = inter_channels or decoder_channels
        self.encoder_channels = encoder_channels
        self.decoder_channels = decoder_channels
        self.theta = self.add_module("theta", Conv2d(encoder_channels, inter_channels, 1, rng))
        self.phi = self.add_module("phi", Conv2d(decoder_channels, inter_channels, 1, rng))
        self.psi = self.add_module("psi", Conv2d(inter_channels, 1, 1, rng))

    def _check(self, encoder_feat: Tensor, decoder_feat: Tensor):
        if encoder_feat.channels != self.encoder_channels or decoder_feat.channels != self.decoder_channels:
            raise ChannelMismatch(
                detail=(
                    f"Gate expects {self.encoder_channels}/{self.decoder_channels} channels, "
                    f"got {encoder_feat.channels}/{decoder_feat.channels}."
                ),
            )

        expected = (2 * decoder_feat.height, 2 * decoder_feat.width)
        if (encoder_feat.height, encoder_feat.width) != expected:
            raise ShapeMismatch(
                detail=(
                    f"Encoder features {encoder_feat.shape} must be twice the resolution "
                    f"of decoder features {decoder_feat.shape}."
                ),
            )

    def mask(self, encoder_feat: Tensor, decoder_feat: Tensor) -> Tensor:
        self._check(encoder_feat, decoder_feat)
        joint = add_elementwise(self.theta(encoder_feat), self.phi(upsample_nearest2x(decoder_feat)))
        return sigmoid(self.psi(relu(joint)))

    @staticmethod
    def apply(encoder_feat: Tensor, mask: Tensor) -> Tensor:
        return multiply(encoder_feat, mask)

    def forward(self, encoder_feat: Tensor, decoder_feat: Tensor) -> Tensor:
        return self.apply(encoder_feat, self.mask(encoder_feat, decoder_feat))
