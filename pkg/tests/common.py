"""Brute-force references the vectorised implementations are checked against."""

import numpy as np


def naive_conv2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Same-padded stride-1 convolution of one ``H x W x C`` image, pixel by pixel."""
    height, width, _ = x.shape
    kh, kw, _, out_channels = weight.shape
    top, left = (kh - 1) // 2, (kw - 1) // 2
    out = np.zeros((height, width, out_channels))
    for row in range(height):
        for col in range(width):
            for dy in range(kh):
                for dx in range(kw):
                    src_row, src_col = row + dy - top, col + dx - left
                    if 0 <= src_row < height and 0 <= src_col < width:
                        out[row, col] += x[src_row, src_col] @ weight[dy, dx]
    return out + bias


def naive_transposed_conv2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    height, width, _ = x.shape
    out = np.zeros((2 * height, 2 * width, weight.shape[3]))
    for row in range(height):
        for col in range(width):
            for dy in range(2):
                for dx in range(2):
                    out[2 * row + dy, 2 * col + dx] = x[row, col] @ weight[dy, dx]
    return out + bias


def naive_maxpool2d(x: np.ndarray) -> np.ndarray:
    height, width, channels = x.shape
    out = np.zeros((height // 2, width // 2, channels))
    for row in range(height // 2):
        for col in range(width // 2):
            out[row, col] = x[2 * row : 2 * row + 2, 2 * col : 2 * col + 2].max(axis=(0, 1))
    return out


def naive_confusion(prediction: np.ndarray, truth: np.ndarray, num_classes: int) -> tuple[list, list, list]:
    """Per-class (correct, truth, predicted) pixel tallies."""
    correct, truth_counts, predicted = [0] * num_classes, [0] * num_classes, [0] * num_classes
    for pred_value, true_value in zip(prediction.ravel().tolist(), truth.ravel().tolist()):
        truth_counts[true_value] += 1
        predicted[pred_value] += 1
        if pred_value == true_value:
            correct[true_value] += 1
    return correct, truth_counts, predicted


def naive_threshold_labels(scores: np.ndarray, thresholds: list[float]) -> np.ndarray:
    """Per pixel: walk classes by descending score, stop at background or the first class over its threshold."""
    height, width, _ = scores.shape
    labels = np.zeros((height, width), dtype=np.int64)
    for row in range(height):
        for col in range(width):
            ranked = sorted(range(scores.shape[-1]), key=lambda c: (-scores[row, col, c], c))
            for class_id in ranked:
                if class_id == 0 or scores[row, col, class_id] >= thresholds[class_id - 1]:
                    labels[row, col] = class_id
                    break
    return labels


def random_scores(rng: np.random.Generator, height: int, width: int, num_classes: int) -> np.ndarray:
    logits = rng.standard_normal((height, width, num_classes))
    exp = np.exp(logits - logits.max(axis=-1, keepdims=True))
    return exp / exp.sum(axis=-1, keepdims=True)
