"""
Deep-supervision flows.

``DeepSupervisionV1`` and ``DeepSupervisionV2`` replace the skip connections with 1x1-conv signals
built from the encoder outputs; ``DeepSupervisionV3`` accumulates the decoder outputs into the input of
the classification head. All three are linear in their 1x1-conv weights.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from segkit.exceptions import ShapeMismatch
from segkit.nn.enums import BlockKind
from segkit.nn.layers import Conv2d
from segkit.nn.module import Module
from segkit.tensor import Tensor, add_elementwise, maxpool2d, upsample_nearest2x

DS_V3_WIDTH = 64


def _check_levels(feats: Sequence[Tensor], expected: int):
    if len(feats) != expected:
        raise ShapeMismatch(detail=f"Expected {expected} feature levels, got {len(feats)}.")


class _Projections(Module):
    def __init__(self, channels: Sequence[int], width: int, rng: np.random.Generator):
        super().__init__()
        self.width = width
        self.convs = [
            self.add_module(f"conv{level}", Conv2d(in_channels, width, 1, rng))
            for level, in_channels in enumerate(channels, start=1)
        ]


class DeepSupervisionV1(_Projections):
    """``S_5 = conv(C_5)``; ``S_n = conv(C_n) + upsample(S_{n+1})`` for n = 4..1."""

    kind = BlockKind.DS_V1

    def forward(self, encoder_feats: Sequence[Tensor]) -> list[Tensor]:
        _check_levels(encoder_feats, len(self.convs))
        signal = self.convs[-1](encoder_feats[-1])
        signals = [signal]
        for conv, feat in zip(reversed(self.convs[:-1]), reversed(encoder_feats[:-1])):
            signal = add_elementwise(conv(feat), upsample_nearest2x(signal))
            signals.append(signal)
        return signals[::-1]


class DeepSupervisionV2(_Projections):
    """``S_1 = conv(C_1)``; ``S_n = conv(C_n) + max_pool(S_{n-1})`` for n = 2..4."""

    kind = BlockKind.DS_V2

    def forward(self, encoder_feats: Sequence[Tensor]) -> list[Tensor]:
        _check_levels(encoder_feats, len(self.convs))
        signal = self.convs[0](encoder_feats[0])
        signals = [signal]
        for conv, feat in zip(self.convs[1:], encoder_feats[1:]):
            signal = add_elementwise(conv(feat), maxpool2d(signal))
            signals.append(signal)
        return signals


class DeepSupervisionV3(_Projections):
    """
    ``Z_5 = conv(C_5)``; ``Z_n = conv(T_n) + upsample(Z_{n+1})`` for n = 4..1.

    Built from the decoder channel plan followed by the bottleneck channels. Returns ``Z_1..Z_5``;
    ``Z_1`` feeds the classification head.
    """

    kind = BlockKind.DS_V3

    def __init__(self, channels: Sequence[int], rng: np.random.Generator, width: int = DS_V3_WIDTH):
        super().__init__(channels, width, rng)

    def forward(self, decoder_feats: Sequence[Tensor], bottleneck: Tensor) -> list[Tensor]:
        _check_levels(decoder_feats, len(self.convs) - 1)
        signal = self.convs[-1](bottleneck)
        signals = [signal]
        for conv, feat in zip(reversed(self.convs[:-1]), reversed(decoder_feats)):
            signal = add_elementwise(conv(feat), upsample_nearest2x(signal))
            signals.append(signal)
        return signals[::-1]
