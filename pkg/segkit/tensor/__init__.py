"""Minimal deterministic tensor engine with reverse-mode differentiation."""

from segkit.tensor.ops import (
    ConvKernel,
    add_elementwise,
    average,
    batchnorm,
    concat_channels,
    conv2d,
    cross_entropy,
    maxpool2d,
    multiply,
    prelu,
    relu,
    scale,
    sigmoid,
    softmax_channelwise,
    sum_all,
    transposed_conv2d,
    upsample_nearest2x,
)
from segkit.tensor.tensor import Tensor, backward, is_grad_enabled, no_grad

__all__ = [
    "ConvKernel",
    "Tensor",
    "add_elementwise",
    "average",
    "backward",
    "batchnorm",
    "concat_channels",
    "conv2d",
    "cross_entropy",
    "is_grad_enabled",
    "maxpool2d",
    "multiply",
    "no_grad",
    "prelu",
    "relu",
    "scale",
    "sigmoid",
    "softmax_channelwise",
    "sum_all",
    "transposed_conv2d",
    "upsample_nearest2x",
]
