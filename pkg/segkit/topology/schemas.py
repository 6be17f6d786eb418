from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from segkit.exceptions import InvalidTopology
from segkit.nn.enums import Activation, ConvKind, OptimizerKind
from segkit.tensor import Tensor

DEPTH = 4
Q_LEVEL_CHANNELS = 64


def check_block_combination(spec: TopologySpec) -> TopologySpec:
    """Raise ``InvalidTopology`` when the complementary blocks cannot be combined."""
    skip_replacements = [name for name in ("attention", "ds_v1", "ds_v2") if getattr(spec, name)]
    if len(skip_replacements) > 1:
        raise InvalidTopology(
            detail=f"Topology {spec.id!r}: {', '.join(skip_replacements)} all replace the skip connections.",
            pointer="/attention",
        )

    if spec.multi_kernel and spec.m % 4:
        raise InvalidTopology(
            detail=f"Topology {spec.id!r}: multi-kernel input needs m divisible by 4, got m={spec.m}.",
            pointer="/m",
        )

    if spec.depth != DEPTH:
        raise InvalidTopology(detail=f"Only depth {DEPTH} is supported, got {spec.depth}.", pointer="/depth")

    return spec


class TopologySpec(BaseModel):
    """Declarative description of a U-Net variant."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = "custom"
    conv_kind: ConvKind = ConvKind.U
    multi_kernel: bool = False
    attention: bool = False
    ds_v1: bool = False
    ds_v2: bool = False
    ds_v3: bool = False
    m: int = Field(default=64, ge=1)
    depth: Literal[4] = DEPTH
    num_classes: int = Field(default=12, ge=2)
    activation: Activation = Activation.RELU
    in_channels: int = Field(default=2, ge=1)

    @model_validator(mode="after")
    def validate_combination(self) -> TopologySpec:
        return check_block_combination(self)

    def level_channels(self) -> list[int]:
        """Channels of encoder levels 1..4 followed by the bottleneck."""
        if self.conv_kind == ConvKind.Q:
            return [Q_LEVEL_CHANNELS] * (DEPTH + 1)

        return [self.m * 2**level for level in range(DEPTH + 1)]

    def skip_channels(self) -> list[int]:
        """Channels of the fusion signals ``S_1..S_4`` entering the decoder."""
        channels = self.level_channels()[:DEPTH]
        if self.ds_v1 or self.ds_v2:
            return [channels[0]] * DEPTH

        return channels

    @property
    def configuration(self) -> str:
        parts = ["U-Net"]
        if self.conv_kind == ConvKind.V:
            parts.append("VGG16")
        elif self.conv_kind == ConvKind.Q:
            parts.append("DenseBlock")
        if self.attention:
            parts.append("attGate")
        if self.multi_kernel:
            parts.append("multi-kernel")
        if self.ds_v3:
            parts.append("DS.v3")
        if self.ds_v1:
            parts.append("DS.v1")
        if self.ds_v2:
            parts.append("DS.v2")
        return " + ".join(parts)


class TopologyPreset(BaseModel):
    """A named topology together with the optimiser settings it was tuned with."""

    model_config = ConfigDict(frozen=True)

    spec: TopologySpec
    optimizer: OptimizerKind
    learning_rate: float = Field(gt=0)


class LevelShape(BaseModel):
    name: str
    height: int
    width: int
    channels: int

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.height, self.width, self.channels


class ShapeCheck(BaseModel):
    name: str
    expected: tuple[int, int, int]
    actual: tuple[int, int, int]

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


class ShapeReport(BaseModel):
    topology_id: str
    height: int
    width: int
    parameter_count: int
    checks: list[ShapeCheck]
    max_score_sum_error: float

    @property
    def passed(self) -> bool:
        return all(check.ok for check in self.checks) and self.max_score_sum_error <= 1e-6


class ForwardTrace(BaseModel):
    """
    Intermediate activations of one forward pass, level 1 first.

    ``encoder`` holds ``C_1..C_5`` (bottleneck last), ``fusion`` the signals ``S_n`` entering the decoder
    (``S_1..S_5`` for DS.v1), ``decoder_inputs`` ``D_1..D_4``, ``decoder`` ``T_1..T_4`` and
    ``deep_supervision`` ``Z_1..Z_5`` when DS.v3 is enabled.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    multi_kernel: Optional[Tensor] = None
    encoder: list[Tensor] = []
    fusion: list[Tensor] = []
    attention_masks: list[Tensor] = []
    decoder_inputs: list[Tensor] = []
    decoder: list[Tensor] = []
    deep_supervision: list[Tensor] = []
    head_input: Tensor
    scores: Tensor

    def named_tensors(self) -> dict[str, Tensor]:
        named = {}
        if self.multi_kernel is not None:
            named["M"] = self.multi_kernel
        for prefix, tensors in (
            ("C", self.encoder),
            ("S", self.fusion),
            ("A", self.attention_masks),
            ("D", self.decoder_inputs),
            ("T", self.decoder),
            ("Z", self.deep_supervision),
        ):
            named.update((f"{prefix}{level}", tensor) for level, tensor in enumerate(tensors, start=1))
        named["head_input"] = self.head_input
        named["scores"] = self.scores
        return named
