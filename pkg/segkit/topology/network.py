from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from segkit.exceptions import ChannelMismatch
from segkit.nn import (
    AttentionGate,
    ClassificationHead,
    ConvBlockU,
    ConvBlockV,
    ConvKind,
    DeepSupervisionV1,
    DeepSupervisionV2,
    DeepSupervisionV3,
    DenseBlockQ,
    Module,
    MultiKernelInput,
    TransposedConv2d,
)
from segkit.nn.deep_supervision import DS_V3_WIDTH
from segkit.tensor import Tensor, concat_channels, maxpool2d
from segkit.topology.plan import check_input_size
from segkit.topology.schemas import DEPTH, ForwardTrace, TopologySpec

log = logging.getLogger(__name__)

VGG_LAYER_COUNTS = (2, 2, 3, 3)
VGG_BOTTLENECK_LAYERS = 3


class UNetVariant(Module):
    """Encoder, bottleneck and decoder with the complementary blocks named by a ``TopologySpec``."""

    def __init__(self, spec: TopologySpec, rng: np.random.Generator):
        super().__init__()
        self.spec = spec
        channels = spec.level_channels()
        skips = spec.skip_channels()

        self.multi_kernel: Optional[MultiKernelInput] = None
        in_channels = spec.in_channels
        if spec.multi_kernel:
            self.multi_kernel = self.add_module(
                "multi_kernel",
                MultiKernelInput(in_channels, spec.m, rng, activation=spec.activation),
            )
            in_channels = spec.m

        self.encoder: list[Module] = []
        for level in range(DEPTH + 1):
            block = self._encoder_block(level, in_channels, channels[level], rng)
            self.encoder.append(self.add_module("bottleneck" if level == DEPTH else f"enc{level + 1}", block))
            in_channels = channels[level]

        self.ds_v1: Optional[DeepSupervisionV1] = None
        self.ds_v2: Optional[DeepSupervisionV2] = None
        self.gates: list[AttentionGate] = []
        if spec.ds_v1:
            self.ds_v1 = self.add_module("ds_v1", DeepSupervisionV1(channels, skips[0], rng))
        elif spec.ds_v2:
            self.ds_v2 = self.add_module("ds_v2", DeepSupervisionV2(channels[:DEPTH], skips[0], rng))
        elif spec.attention:
            self.gates = [
                self.add_module(
                    f"gate{level + 1}",
                    AttentionGate(channels[level], channels[level + 1], rng),
                )
                for level in range(DEPTH)
            ]

        self.upsamplers: list[TransposedConv2d] = [None] * DEPTH
        self.decoder: list[Module] = [None] * DEPTH
        for level in reversed(range(DEPTH)):
            self.upsamplers[level] = self.add_module(
                f"up{level + 1}",
                TransposedConv2d(channels[level + 1], channels[level], rng),
            )
            self.decoder[level] = self.add_module(
                f"dec{level + 1}",
                self._decoder_block(skips[level] + channels[level], channels[level], rng),
            )

        self.ds_v3: Optional[DeepSupervisionV3] = None
        head_channels = channels[0]
        if spec.ds_v3:
            self.ds_v3 = self.add_module("ds_v3", DeepSupervisionV3(channels, rng))
            head_channels = DS_V3_WIDTH

        self.head = self.add_module("head", ClassificationHead(head_channels, spec.num_classes, rng))

    def _encoder_block(self, level: int, in_channels: int, out_channels: int, rng: np.random.Generator) -> Module:
        if self.spec.conv_kind == ConvKind.V:
            layers = VGG_BOTTLENECK_LAYERS if level == DEPTH else VGG_LAYER_COUNTS[level]
            return ConvBlockV(in_channels, out_channels, layers, rng, activation=self.spec.activation)

        return self._decoder_block(in_channels, out_channels, rng)

    def _decoder_block(self, in_channels: int, out_channels: int, rng: np.random.Generator) -> Module:
        if self.spec.conv_kind == ConvKind.Q:
            return DenseBlockQ(in_channels, rng, activation=self.spec.activation, width=out_channels)

        return ConvBlockU(in_channels, out_channels, rng, activation=self.spec.activation)

    def forward(self, x: Tensor) -> ForwardTrace:
        check_input_size(x.height, x.width)
        if x.channels != self.spec.in_channels:
            raise ChannelMismatch(
                detail=f"Topology {self.spec.id!r} expects {self.spec.in_channels} input channels, got {x.channels}.",
            )

        trace: dict = {}
        h = x
        if self.multi_kernel is not None:
            h = trace["multi_kernel"] = self.multi_kernel(x)

        encoder = []
        for level, block in enumerate(self.encoder):
            h = block(h)
            encoder.append(h)
            if level < DEPTH:
                h = maxpool2d(h)

        fusion: list[Optional[Tensor]] = list(encoder[:DEPTH])
        if self.ds_v1 is not None:
            fusion = self.ds_v1(encoder)
        elif self.ds_v2 is not None:
            fusion = self.ds_v2(encoder[:DEPTH])
        elif self.gates:
            fusion = [None] * DEPTH

        masks: list[Optional[Tensor]] = [None] * DEPTH
        decoder_inputs: list[Optional[Tensor]] = [None] * DEPTH
        decoder: list[Optional[Tensor]] = [None] * DEPTH
        t = encoder[DEPTH]
        for level in reversed(range(DEPTH)):
            if self.gates:
                gate = self.gates[level]
                masks[level] = gate.mask(encoder[level], t)
                fusion[level] = gate.apply(encoder[level], masks[level])

            decoder_inputs[level] = concat_channels([fusion[level], self.upsamplers[level](t)])
            t = decoder[level] = self.decoder[level](decoder_inputs[level])

        head_input = decoder[0]
        deep_supervision = []
        if self.ds_v3 is not None:
            deep_supervision = self.ds_v3(decoder, encoder[DEPTH])
            head_input = deep_supervision[0]

        return ForwardTrace(
            encoder=encoder,
            fusion=fusion,
            attention_masks=masks if self.gates else [],
            decoder_inputs=decoder_inputs,
            decoder=decoder,
            deep_supervision=deep_supervision,
            head_input=head_input,
            scores=self.head(head_input),
            **trace,
        )

    def scores(self, x: Tensor) -> Tensor:
        return self.forward(x).scores

    def features(self, x: Tensor) -> Tensor:
        """The tensor consumed by the classification head (``Z_1`` with DS.v3, ``T_1`` otherwise)."""
        return self.forward(x).head_input
