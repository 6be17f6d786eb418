"""
Numpy kernels behind the differentiable operators.

Every kernel works on batched ``N x H x W x C`` arrays. Convolution weights are laid out as
``k_h x k_w x in_channels x out_channels``.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def same_padding(kernel_size: int) -> tuple[int, int]:
    before = (kernel_size - 1) // 2
    return before, kernel_size - 1 - before


def conv2d_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    kh, kw = weight.shape[:2]
    if kh == kw == 1:
        return x @ weight[0, 0] + bias

    padded = np.pad(x, ((0, 0), same_padding(kh), same_padding(kw), (0, 0)))
    # windows: N x H x W x C x kh x kw
    windows = sliding_window_view(padded, (kh, kw), axis=(1, 2))
    return np.tensordot(windows, weight, axes=([4, 5, 3], [0, 1, 2])) + bias


def conv2d_backward(
    grad: np.ndarray,
    x: np.ndarray,
    weight: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return gradients for input, weight and bias."""
    kh, kw = weight.shape[:2]
    grad_bias = grad.sum(axis=(0, 1, 2))
    if kh == kw == 1:
        grad_x = grad @ weight[0, 0].T
        grad_weight = np.tensordot(x, grad, axes=([0, 1, 2], [0, 1, 2]))[None, None]
        return grad_x, grad_weight, grad_bias

    pad_top, _ = same_padding(kh)
    pad_left, _ = same_padding(kw)
    padded = np.pad(x, ((0, 0), same_padding(kh), same_padding(kw), (0, 0)))
    windows = sliding_window_view(padded, (kh, kw), axis=(1, 2))
    grad_weight = np.tensordot(windows, grad, axes=([0, 1, 2], [0, 1, 2])).transpose(1, 2, 0, 3)

    # full correlation of the output gradient with the flipped kernel, then crop back to the input frame
    grad_padded = np.pad(grad, ((0, 0), (kh - 1, kh - 1), (kw - 1, kw - 1), (0, 0)))
    grad_windows = sliding_window_view(grad_padded, (kh, kw), axis=(1, 2))
    flipped = weight[::-1, ::-1]
    full = np.tensordot(grad_windows, flipped, axes=([4, 5, 3], [0, 1, 3]))
    height, width = x.shape[1:3]
    grad_x = full[:, pad_top : pad_top + height, pad_left : pad_left + width]
    return np.ascontiguousarray(grad_x), grad_weight, grad_bias


def transposed_conv2d_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    n, h, w, _ = x.shape
    out_channels = weight.shape[3]
    # N x h x w x 2 x 2 x out -> N x h x 2 x w x 2 x out
    scattered = np.tensordot(x, weight, axes=([3], [2])).transpose(0, 1, 3, 2, 4, 5)
    return scattered.reshape(n, 2 * h, 2 * w, out_channels) + bias


def transposed_conv2d_backward(
    grad: np.ndarray,
    x: np.ndarray,
    weight: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, h, w, _ = x.shape
    out_channels = weight.shape[3]
    blocks = grad.reshape(n, h, 2, w, 2, out_channels).transpose(0, 1, 3, 2, 4, 5)
    grad_x = np.tensordot(blocks, weight, axes=([3, 4, 5], [0, 1, 3]))
    grad_weight = np.tensordot(x, blocks, axes=([0, 1, 2], [0, 1, 2])).transpose(1, 2, 0, 3)
    return grad_x, grad_weight, grad.sum(axis=(0, 1, 2))


def pool_windows(x: np.ndarray) -> np.ndarray:
    """N x H x W x C -> N x H/2 x W/2 x C x 4, window entries in row-major order."""
    n, h, w, c = x.shape
    return x.reshape(n, h // 2, 2, w // 2, 2, c).transpose(0, 1, 3, 5, 2, 4).reshape(n, h // 2, w // 2, c, 4)


def maxpool2d_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    windows = pool_windows(x)
    winners = windows.argmax(axis=-1)
    return np.take_along_axis(windows, winners[..., None], axis=-1)[..., 0], winners


def maxpool2d_backward(grad: np.ndarray, winners: np.ndarray, input_shape: tuple[int, ...]) -> np.ndarray:
    n, h, w, c = input_shape
    grad_windows = np.zeros((*grad.shape, 4), dtype=grad.dtype)
    np.put_along_axis(grad_windows, winners[..., None], grad[..., None], axis=-1)
    return grad_windows.reshape(n, h // 2, w // 2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(n, h, w, c)


def upsample2x_forward(x: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(x, 2, axis=1), 2, axis=2)


def upsample2x_backward(grad: np.ndarray) -> np.ndarray:
    n, h2, w2, c = grad.shape
    return grad.reshape(n, h2 // 2, 2, w2 // 2, 2, c).sum(axis=(2, 4))


def batchnorm_train_forward(
    x: np.ndarray,
    gamma: np.ndarray,
    beta: np.ndarray,
    eps: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return output, normalised input, batch mean and population variance."""
    mean = x.mean(axis=(0, 1, 2))
    var = x.var(axis=(0, 1, 2))
    x_hat = (x - mean) / np.sqrt(var + eps)
    return gamma * x_hat + beta, x_hat, mean, var


def batchnorm_train_backward(
    grad: np.ndarray,
    x_hat: np.ndarray,
    var: np.ndarray,
    gamma: np.ndarray,
    eps: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    count = grad.shape[0] * grad.shape[1] * grad.shape[2]
    inv_std = 1.0 / np.sqrt(var + eps)
    grad_x_hat = grad * gamma
    grad_x = (
        inv_std
        / count
        * (
            count * grad_x_hat
            - grad_x_hat.sum(axis=(0, 1, 2))
            - x_hat * (grad_x_hat * x_hat).sum(axis=(0, 1, 2))
        )
    )
    return grad_x, (grad * x_hat).sum(axis=(0, 1, 2)), grad.sum(axis=(0, 1, 2))
