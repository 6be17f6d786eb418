from __future__ import annotations

from enum import Enum


class ConvKind(str, Enum):
    U = "U"
    V = "V"
    Q = "Q"


class Activation(str, Enum):
    RELU = "relu"
    PRELU = "prelu"


class BlockKind(str, Enum):
    U = "U"
    V = "V"
    Q = "Q"
    M = "M"
    AG = "AG"
    DS_V1 = "DSv1"
    DS_V2 = "DSv2"
    DS_V3 = "DSv3"
    HEAD = "Head"

    @staticmethod
    def conv_blocks() -> list[BlockKind]:
        return [BlockKind.U, BlockKind.V, BlockKind.Q]


class OptimizerKind(str, Enum):
    ADAM = "adam"
    RMSPROP = "rmsprop"
    ADADELTA = "adadelta"
