from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from segkit.exceptions import InvalidConfig, NumericalError
from segkit.nn.enums import OptimizerKind
from segkit.tensor import Tensor

log = logging.getLogger(__name__)

EPSILON = 1e-7


class Optimizer:
    """Updates parameters in place from their ``grad`` slots. Parameters without a gradient are skipped."""

    def __init__(self, parameters: Sequence[Tensor], learning_rate: float):
        if learning_rate <= 0:
            raise InvalidConfig(detail=f"Learning rate must be positive, got {learning_rate}.")

        self.parameters = list(parameters)
        self.learning_rate = learning_rate
        self.state: list[dict[str, np.ndarray]] = [{} for _ in self.parameters]
        self.iterations = 0

    def zero_grad(self):
        for parameter in self.parameters:
            parameter.zero_grad()

    def step(self):
        self.iterations += 1
        for index, (parameter, state) in enumerate(zip(self.parameters, self.state)):
            if parameter.grad is None:
                continue

            if not np.all(np.isfinite(parameter.grad)):
                raise NumericalError(
                    detail=f"Non-finite gradient for parameter #{index} ({parameter.name}) at step {self.iterations}.",
                )

            update = self.compute_update(parameter.grad.astype(parameter.dtype), state)
            parameter.data -= update.astype(parameter.dtype)

    def compute_update(self, grad: np.ndarray, state: dict[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError


class Adam(Optimizer):
    def __init__(
        self,
        parameters: Sequence[Tensor],
        learning_rate: float = 0.00033,
        beta_1: float = 0.9,
        beta_2: float = 0.999,
    ):
        super().__init__(parameters, learning_rate)
        self.beta_1 = beta_1
        self.beta_2 = beta_2

    def compute_update(self, grad: np.ndarray, state: dict[str, np.ndarray]) -> np.ndarray:
        m = state.setdefault("m", np.zeros_like(grad))
        v = state.setdefault("v", np.zeros_like(grad))
        m *= self.beta_1
        m += (1 - self.beta_1) * grad
        v *= self.beta_2
        v += (1 - self.beta_2) * grad * grad
        m_hat = m / (1 - self.beta_1**self.iterations)
        v_hat = v / (1 - self.beta_2**self.iterations)
        return self.learning_rate * m_hat / (np.sqrt(v_hat) + EPSILON)


class RMSprop(Optimizer):
    def __init__(self, parameters: Sequence[Tensor], learning_rate: float = 0.001, rho: float = 0.9):
        super().__init__(parameters, learning_rate)
        self.rho = rho

    def compute_update(self, grad: np.ndarray, state: dict[str, np.ndarray]) -> np.ndarray:
        mean_square = state.setdefault("mean_square", np.zeros_like(grad))
        mean_square *= self.rho
        mean_square += (1 - self.rho) * grad * grad
        return self.learning_rate * grad / (np.sqrt(mean_square) + EPSILON)


class Adadelta(Optimizer):
    def __init__(self, parameters: Sequence[Tensor], learning_rate: float = 1.0, rho: float = 0.95):
        super().__init__(parameters, learning_rate)
        self.rho = rho

    def compute_update(self, grad: np.ndarray, state: dict[str, np.ndarray]) -> np.ndarray:
        accumulated_grad = state.setdefault("accumulated_grad", np.zeros_like(grad))
        accumulated_delta = state.setdefault("accumulated_delta", np.zeros_like(grad))
        accumulated_grad *= self.rho
        accumulated_grad += (1 - self.rho) * grad * grad
        delta = np.sqrt(accumulated_delta + EPSILON) / np.sqrt(accumulated_grad + EPSILON) * grad
        accumulated_delta *= self.rho
        accumulated_delta += (1 - self.rho) * delta * delta
        return self.learning_rate * delta


OPTIMIZERS: dict[OptimizerKind, type[Optimizer]] = {
    OptimizerKind.ADAM: Adam,
    OptimizerKind.RMSPROP: RMSprop,
    OptimizerKind.ADADELTA: Adadelta,
}


def make_optimizer(kind: OptimizerKind, parameters: Sequence[Tensor], learning_rate: float) -> Optimizer:
    log.debug("Optimizer %s, learning rate %s, %s parameters", kind.value, learning_rate, len(parameters))
    return OPTIMIZERS[OptimizerKind(kind)](parameters, learning_rate=learning_rate)
