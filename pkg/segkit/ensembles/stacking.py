"""
Trainable combiner over frozen member outputs: merge, positionwise dense layer with ReLU, then a positionwise
dense layer with softmax. Positionwise dense layers are 1x1 convolutions.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from segkit.ensembles.schemas import MergeMode, StackingConfig, StackingInput
from segkit.exceptions import InvalidEnsemble
from segkit.nn.head import ClassificationHead
from segkit.nn.layers import Conv2d, ReLU
from segkit.nn.module import Module
from segkit.tensor import Tensor, add_elementwise, average, concat_channels
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)


def merged_width(merge: MergeMode, member_widths: Sequence[int]) -> int:
    if merge == MergeMode.CONCAT:
        return sum(member_widths)

    if len(set(member_widths)) != 1:
        msg = f"Merge mode {merge.value!r} needs members of equal width, got {list(member_widths)}."
        raise InvalidEnsemble(detail=msg, parameter="merge")

    return member_widths[0]


class StackingModel(Module):
    def __init__(
        self,
        config: StackingConfig,
        member_widths: Sequence[int],
        num_classes: int,
        rng: np.random.Generator,
    ):
        super().__init__()
        if len(member_widths) < 1:
            msg = "A stacking model needs at least one member."
            raise InvalidEnsemble(detail=msg)

        if config.input == StackingInput.NORMALIZED and any(width != num_classes for width in member_widths):
            msg = f"Normalised stacking input needs {num_classes}-channel members, got {list(member_widths)}."
            raise InvalidEnsemble(detail=msg, parameter="input")

        self.config = config
        self.member_widths = list(member_widths)
        self.num_classes = num_classes
        width = merged_width(config.merge, member_widths)
        self.hidden = self.add_module("hidden", Conv2d(width, config.hidden_width, 1, rng))
        self.act = self.add_module("act", ReLU())
        self.prediction = self.add_module("prediction", ClassificationHead(config.hidden_width, num_classes, rng))

    @classmethod
    def create(cls, config: StackingConfig, member_widths: Sequence[int], num_classes: int, seed: int = 0):
        return cls(config, member_widths, num_classes, make_rng(seed, Stream.INIT))

    def merge(self, member_outputs: Sequence[Tensor]) -> Tensor:
        widths = [output.channels for output in member_outputs]
        if widths != self.member_widths:
            msg = f"Stacking model expects member widths {self.member_widths}, got {widths}."
            raise InvalidEnsemble(detail=msg)

        if self.config.merge == MergeMode.CONCAT:
            return concat_channels(member_outputs)

        if self.config.merge == MergeMode.AVERAGE:
            return average(member_outputs)

        merged = member_outputs[0]
        for output in member_outputs[1:]:
            merged = add_elementwise(merged, output)
        return merged

    def forward(self, member_outputs: Sequence[Tensor]) -> Tensor:
        return self.prediction(self.act(self.hidden(self.merge(member_outputs))))
