"""
Differentiable operators.

Activation operators accept ``H x W x C`` tensors or batches ``N x H x W x C`` and return the same rank.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Union

import numpy as np
from scipy.special import expit, softmax

from segkit.exceptions import ChannelMismatch, InvalidDimension, InvalidShape, ShapeMismatch
from segkit.tensor import kernels
from segkit.tensor.tensor import Tensor

LOG_FLOOR = 1e-12


class ConvKernel:
    """
    Convolution weights ``k_h x k_w x in_channels x out_channels`` and one bias per output channel.
    """

    def __init__(self, weight: Tensor, bias: Tensor):
        if weight.ndim != 4:
            raise InvalidShape(detail=f"Kernel weights must have rank 4, got shape {weight.shape}.")

        if bias.shape != (weight.shape[3],):
            raise InvalidShape(
                detail=f"Bias shape {bias.shape} does not match {weight.shape[3]} output channels.",
            )

        self.weight = weight
        self.bias = bias

    @property
    def k_h(self) -> int:
        return self.weight.shape[0]

    @property
    def k_w(self) -> int:
        return self.weight.shape[1]

    @property
    def in_channels(self) -> int:
        return self.weight.shape[2]

    @property
    def out_channels(self) -> int:
        return self.weight.shape[3]


def _lift(x: Tensor) -> tuple[np.ndarray, bool]:
    if x.ndim == 4:
        return x.data, True

    if x.ndim == 3:
        return x.data[None], False

    raise InvalidShape(detail=f"Expected an HxWxC tensor or a batch of them, got shape {x.shape}.")


def _drop(data: np.ndarray, batched: bool) -> np.ndarray:
    return data if batched else data[0]


def _check_channels(x: Tensor, kernel: ConvKernel):
    if x.channels != kernel.in_channels:
        raise ChannelMismatch(
            detail=f"Input has {x.channels} channels, kernel expects {kernel.in_channels}.",
        )


def conv2d(x: Tensor, kernel: ConvKernel) -> Tensor:
    """Stride-1 convolution with same zero padding."""
    _check_channels(x, kernel)
    data, batched = _lift(x)
    weight, bias = kernel.weight, kernel.bias

    def backward_fn(grad: np.ndarray):
        grad_x, grad_w, grad_b = kernels.conv2d_backward(grad if batched else grad[None], data, weight.data)
        return _drop(grad_x, batched), grad_w, grad_b

    out = kernels.conv2d_forward(data, weight.data, bias.data)
    return Tensor.from_op(_drop(out, batched), (x, weight, bias), backward_fn)


def transposed_conv2d(x: Tensor, kernel: ConvKernel) -> Tensor:
    """2x2 kernel, stride 2: every input pixel scatters into its own 2x2 output block."""
    _check_channels(x, kernel)
    if (kernel.k_h, kernel.k_w) != (2, 2):
        raise InvalidShape(detail=f"Transposed convolution needs a 2x2 kernel, got {kernel.k_h}x{kernel.k_w}.")

    data, batched = _lift(x)
    weight, bias = kernel.weight, kernel.bias

    def backward_fn(grad: np.ndarray):
        grad_x, grad_w, grad_b = kernels.transposed_conv2d_backward(
            grad if batched else grad[None],
            data,
            weight.data,
        )
        return _drop(grad_x, batched), grad_w, grad_b

    out = kernels.transposed_conv2d_forward(data, weight.data, bias.data)
    return Tensor.from_op(_drop(out, batched), (x, weight, bias), backward_fn)


def maxpool2d(x: Tensor) -> Tensor:
    data, batched = _lift(x)
    if data.shape[1] % 2 or data.shape[2] % 2:
        raise InvalidDimension(detail=f"Max pooling needs even spatial dimensions, got {data.shape[1:3]}.")

    out, winners = kernels.maxpool2d_forward(data)

    def backward_fn(grad: np.ndarray):
        grad_x = kernels.maxpool2d_backward(grad if batched else grad[None], winners, data.shape)
        return (_drop(grad_x, batched),)

    return Tensor.from_op(_drop(out, batched), (x,), backward_fn)


def upsample_nearest2x(x: Tensor) -> Tensor:
    data, batched = _lift(x)

    def backward_fn(grad: np.ndarray):
        return (_drop(kernels.upsample2x_backward(grad if batched else grad[None]), batched),)

    return Tensor.from_op(_drop(kernels.upsample2x_forward(data), batched), (x,), backward_fn)


def relu(x: Tensor) -> Tensor:
    active = x.data > 0

    def backward_fn(grad: np.ndarray):
        return (grad * active,)

    return Tensor.from_op(np.where(active, x.data, 0).astype(x.dtype), (x,), backward_fn)


def prelu(x: Tensor, slope: Tensor) -> Tensor:
    """Leaky rectifier with one learnable slope per channel."""
    if slope.shape != (x.channels,):
        raise ChannelMismatch(detail=f"PReLU slope shape {slope.shape} does not match {x.channels} channels.")

    active = x.data > 0
    reduce_axes = tuple(range(x.ndim - 1))

    def backward_fn(grad: np.ndarray):
        grad_x = grad * np.where(active, 1, slope.data)
        grad_slope = (grad * np.where(active, 0, x.data)).sum(axis=reduce_axes)
        return grad_x.astype(x.dtype), grad_slope

    out = np.where(active, x.data, slope.data * x.data).astype(x.dtype)
    return Tensor.from_op(out, (x, slope), backward_fn)


def sigmoid(x: Tensor) -> Tensor:
    out = expit(x.data)

    def backward_fn(grad: np.ndarray):
        return (grad * out * (1 - out),)

    return Tensor.from_op(out, (x,), backward_fn)


def softmax_channelwise(x: Tensor) -> Tensor:
    out = softmax(x.data, axis=-1)

    def backward_fn(grad: np.ndarray):
        return (out * (grad - (grad * out).sum(axis=-1, keepdims=True)),)

    return Tensor.from_op(out, (x,), backward_fn)


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.9,
    eps: float = 1e-5,
) -> Tensor:
    """
    Per-channel batch normalisation.

    In training mode the statistics of the current batch (over N, H and W) are used and the running
    statistics are updated in place as ``momentum * running + (1 - momentum) * batch``.
    In evaluation mode the running statistics are used.
    """
    if gamma.shape != (x.channels,) or beta.shape != (x.channels,):
        raise ChannelMismatch(
            detail=f"Batch norm parameters {gamma.shape}/{beta.shape} do not match {x.channels} channels.",
        )

    data, batched = _lift(x)
    if training:
        out, x_hat, mean, var = kernels.batchnorm_train_forward(data, gamma.data, beta.data, eps)
        running_mean *= momentum
        running_mean += (1 - momentum) * mean
        running_var *= momentum
        running_var += (1 - momentum) * var

        def backward_fn(grad: np.ndarray):
            grad_x, grad_gamma, grad_beta = kernels.batchnorm_train_backward(
                grad if batched else grad[None],
                x_hat,
                var,
                gamma.data,
                eps,
            )
            return _drop(grad_x, batched), grad_gamma, grad_beta

        return Tensor.from_op(_drop(out, batched).astype(x.dtype), (x, gamma, beta), backward_fn)

    inv_std = 1.0 / np.sqrt(running_var + eps)
    x_hat = (data - running_mean) * inv_std

    def backward_eval_fn(grad: np.ndarray):
        grad = grad if batched else grad[None]
        grad_x = grad * gamma.data * inv_std
        return _drop(grad_x, batched), (grad * x_hat).sum(axis=(0, 1, 2)), grad.sum(axis=(0, 1, 2))

    out = (gamma.data * x_hat + beta.data).astype(x.dtype)
    return Tensor.from_op(_drop(out, batched), (x, gamma, beta), backward_eval_fn)


def concat_channels(inputs: Sequence[Tensor]) -> Tensor:
    if not inputs:
        raise InvalidShape(detail="Nothing to concatenate.")

    leading = inputs[0].shape[:-1]
    for item in inputs[1:]:
        if item.shape[:-1] != leading:
            raise ShapeMismatch(
                detail=f"Concatenated tensors differ in spatial shape: {leading} vs {item.shape[:-1]}.",
            )

    splits = np.cumsum([item.channels for item in inputs])[:-1]

    def backward_fn(grad: np.ndarray):
        return tuple(np.split(grad, splits, axis=-1))

    out = np.concatenate([item.data for item in inputs], axis=-1)
    return Tensor.from_op(out, tuple(inputs), backward_fn)


def add_elementwise(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatch(detail=f"Cannot add tensors of shapes {a.shape} and {b.shape}.")

    def backward_fn(grad: np.ndarray):
        return grad, grad

    return Tensor.from_op(a.data + b.data, (a, b), backward_fn)


def multiply(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise product; ``b`` may be a single-channel mask broadcast over the channels of ``a``."""
    broadcast = b.shape != a.shape
    if broadcast and b.shape != (*a.shape[:-1], 1):
        raise ShapeMismatch(detail=f"Cannot multiply tensors of shapes {a.shape} and {b.shape}.")

    def backward_fn(grad: np.ndarray):
        grad_b = grad * a.data
        if broadcast:
            grad_b = grad_b.sum(axis=-1, keepdims=True)
        return grad * b.data, grad_b

    return Tensor.from_op(a.data * b.data, (a, b), backward_fn)


def average(inputs: Sequence[Tensor]) -> Tensor:
    if not inputs:
        raise InvalidShape(detail="Nothing to average.")

    shape = inputs[0].shape
    for item in inputs[1:]:
        if item.shape != shape:
            raise ShapeMismatch(detail=f"Averaged tensors differ in shape: {shape} vs {item.shape}.")

    count = len(inputs)

    def backward_fn(grad: np.ndarray):
        share = grad / count
        return tuple(share for _ in range(count))

    out = np.mean([item.data for item in inputs], axis=0).astype(inputs[0].dtype)
    return Tensor.from_op(out, tuple(inputs), backward_fn)


def sum_all(x: Tensor) -> Tensor:
    def backward_fn(grad: np.ndarray):
        return (np.broadcast_to(grad, x.shape).astype(x.dtype),)

    return Tensor.from_op(np.asarray(x.data.sum(), dtype=x.dtype), (x,), backward_fn)


def scale(x: Tensor, factor: float) -> Tensor:
    def backward_fn(grad: np.ndarray):
        return (grad * factor,)

    return Tensor.from_op(x.data * factor, (x,), backward_fn)


def cross_entropy(scores: Tensor, target: Union[Tensor, np.ndarray], floor: float = LOG_FLOOR) -> Tensor:
    """Mean over pixels of ``-sum_c target_c * ln(score_c)``, scores floored before the logarithm."""
    target_data = target.data if isinstance(target, Tensor) else np.asarray(target)
    if target_data.shape != scores.shape:
        raise ShapeMismatch(detail=f"Scores {scores.shape} and target {target_data.shape} differ in shape.")

    pixels = scores.data.size // scores.channels
    clipped = np.maximum(scores.data, floor)
    loss = -(target_data * np.log(clipped)).sum() / pixels

    def backward_fn(grad: np.ndarray):
        grad_scores = np.where(scores.data > floor, -target_data / clipped, 0) / pixels
        return (grad * grad_scores).astype(scores.dtype), None

    carrier = target if isinstance(target, Tensor) else Tensor(target_data)
    return Tensor.from_op(np.asarray(loss, dtype=scores.dtype), (scores, carrier), backward_fn)
