"""Composable building blocks of the U-Net variants."""

from segkit.nn.attention import AttentionGate
from segkit.nn.blocks import ConvBlockU, ConvBlockV, DenseBlockQ, MultiKernelInput
from segkit.nn.deep_supervision import DeepSupervisionV1, DeepSupervisionV2, DeepSupervisionV3
from segkit.nn.enums import Activation, BlockKind, ConvKind, OptimizerKind
from segkit.nn.head import ClassificationHead
from segkit.nn.layers import BatchNorm2d, Conv2d, PReLU, ReLU, TransposedConv2d, make_activation
from segkit.nn.module import Module, Sequential
from segkit.nn.optimizers import Adadelta, Adam, Optimizer, RMSprop, make_optimizer

__all__ = [
    "Activation",
    "Adadelta",
    "Adam",
    "AttentionGate",
    "BatchNorm2d",
    "BlockKind",
    "ClassificationHead",
    "Conv2d",
    "ConvBlockU",
    "ConvBlockV",
    "ConvKind",
    "DeepSupervisionV1",
    "DeepSupervisionV2",
    "DeepSupervisionV3",
    "DenseBlockQ",
    "Module",
    "MultiKernelInput",
    "Optimizer",
    "OptimizerKind",
    "PReLU",
    "RMSprop",
    "ReLU",
    "Sequential",
    "TransposedConv2d",
    "make_activation",
]
