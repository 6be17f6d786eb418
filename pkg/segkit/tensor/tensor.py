from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Callable, Optional

import numpy as np

from segkit.exceptions import GraphError, InvalidShape, NumericalError

log = logging.getLogger(__name__)

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

grad_enabled: ContextVar[bool] = ContextVar("grad_enabled", default=True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording inside the block (inference, frozen ensemble members)."""
    token = grad_enabled.set(False)
    try:
        yield
    finally:
        grad_enabled.reset(token)


def is_grad_enabled() -> bool:
    return grad_enabled.get()


class Tensor:
    """
    Dense floating grid with a gradient slot.

    Activations are ``H x W x C`` (or ``N x H x W x C`` for a batch), row-major with channels innermost.
    Parameters (kernels, biases, per-channel vectors) use the same class with their natural rank.
    """

    def __init__(
        self,
        data: np.ndarray,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.data: np.ndarray = np.asarray(data)
        if not np.issubdtype(self.data.dtype, np.floating):
            self.data = self.data.astype(np.float32)

        if any(dim <= 0 for dim in self.data.shape):
            raise InvalidShape(detail=f"Tensor dimensions must be positive, got {self.data.shape}.")

        self.requires_grad = requires_grad
        self.name = name
        self.grad: Optional[np.ndarray] = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[BackwardFn] = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    @classmethod
    def from_values(
        cls,
        height: int,
        width: int,
        channels: int,
        values: Sequence[float],
        dtype: type = np.float64,
    ) -> Tensor:
        """Build a tensor from a flat value list in height, width, channel order."""
        expected = height * width * channels
        if len(values) != expected:
            raise InvalidShape(
                detail=f"Expected {expected} values for a {height}x{width}x{channels} tensor, got {len(values)}.",
            )

        return cls(np.asarray(values, dtype=dtype).reshape(height, width, channels))

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: tuple[Tensor, ...],
        backward: BackwardFn,
    ) -> Tensor:
        """Wrap an operator result, recording the graph edge when any parent needs a gradient."""
        requires_grad = is_grad_enabled() and any(parent.requires_grad for parent in parents)
        out = cls(data, requires_grad=requires_grad)
        if requires_grad:
            out._parents = parents
            out._backward = backward

        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def height(self) -> int:
        return self.data.shape[-3]

    @property
    def width(self) -> int:
        return self.data.shape[-2]

    @property
    def channels(self) -> int:
        return self.data.shape[-1]

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def values(self) -> list[float]:
        return self.data.reshape(-1).tolist()

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> Tensor:
        return Tensor(self.data, requires_grad=False, name=self.name)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def __add__(self, other: Tensor) -> Tensor:
        from segkit.tensor.ops import add_elementwise

        return add_elementwise(self, other)

    def __mul__(self, other: Tensor) -> Tensor:
        from segkit.tensor.ops import multiply

        return multiply(self, other)


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue

        if id(node) in visited:
            continue

        visited.add(id(node))
        stack.append((node, True))
        stack.extend((parent, False) for parent in node._parents if id(parent) not in visited)

    return order


def backward(loss: Tensor):
    """
    Populate ``grad`` of every leaf reachable from ``loss``.

    Gradients accumulate into leaves across calls until they are reset with ``zero_grad``.
    """
    if loss.data.size != 1:
        raise GraphError(detail=f"Backward needs a scalar loss, got shape {loss.shape}.")

    if loss.is_leaf:
        raise GraphError(detail="Loss was not produced by a recorded forward pass.")

    if not np.all(np.isfinite(loss.data)):
        raise NumericalError(detail=f"Loss is not finite: {loss.item()!r}.")

    order = _topological_order(loss)
    pending: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        grad = pending.pop(id(node), None)
        if grad is None:
            continue

        if node.is_leaf:
            if node.requires_grad:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
            continue

        parent_grads = node._backward(grad)
        for parent, parent_grad in zip(node._parents, parent_grads):
            if parent_grad is None or not parent.requires_grad:
                continue

            key = id(parent)
            pending[key] = pending[key] + parent_grad if key in pending else parent_grad

    log.debug("Backward pass over %s nodes", len(order))
