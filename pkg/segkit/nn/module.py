from __future__ import annotations

import logging
from collections.abc import Iterator
from typing import Any

import numpy as np

from segkit.exceptions import InvalidShape, UnknownIdentifier
from segkit.tensor import Tensor

log = logging.getLogger(__name__)


class Module:
    """
    Owner of named parameters, buffers and child modules.

    Names are dotted paths (``encoder.0.conv1.weight``); they key the state dict and the weights index.
    """

    def __init__(self):
        self._parameters: dict[str, Tensor] = {}
        self._buffers: dict[str, np.ndarray] = {}
        self._modules: dict[str, Module] = {}
        self.training: bool = True

    def __call__(self, *args, **kwargs) -> Any:
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs) -> Any:
        raise NotImplementedError

    def add_parameter(self, name: str, data: np.ndarray) -> Tensor:
        parameter = Tensor(data, requires_grad=True, name=name)
        self._parameters[name] = parameter
        return parameter

    def add_buffer(self, name: str, data: np.ndarray) -> np.ndarray:
        self._buffers[name] = data
        return data

    def buffer(self, name: str) -> np.ndarray:
        return self._buffers[name]

    def add_module(self, name: str, module: Module) -> Module:
        self._modules[name] = module
        return module

    def named_modules(self, prefix: str = "") -> Iterator[tuple[str, Module]]:
        yield prefix, self
        for name, module in self._modules.items():
            yield from module.named_modules(f"{prefix}.{name}" if prefix else name)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        for path, module in self.named_modules():
            for name, parameter in module._parameters.items():
                yield (f"{path}.{name}" if path else name), parameter

    def named_buffers(self) -> Iterator[tuple[str, np.ndarray]]:
        for path, module in self.named_modules():
            for name, data in module._buffers.items():
                yield (f"{path}.{name}" if path else name), data

    def parameters(self) -> list[Tensor]:
        return [parameter for _, parameter in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(parameter.data.size for parameter in self.parameters())

    def train(self, mode: bool = True) -> Module:
        for _, module in self.named_modules():
            module.training = mode
        return self

    def eval(self) -> Module:
        return self.train(False)

    def zero_grad(self):
        for parameter in self.parameters():
            parameter.zero_grad()

    def freeze(self) -> Module:
        for parameter in self.parameters():
            parameter.requires_grad = False
        return self

    def astype(self, dtype: type) -> Module:
        for parameter in self.parameters():
            parameter.data = parameter.data.astype(dtype)
            parameter.zero_grad()

        for _, module in self.named_modules():
            for name, data in module._buffers.items():
                module._buffers[name] = data.astype(dtype)

        return self

    def state_dict(self) -> dict[str, np.ndarray]:
        state = {name: parameter.data.copy() for name, parameter in self.named_parameters()}
        state.update((name, data.copy()) for name, data in self.named_buffers())
        return state

    def load_state_dict(self, state: dict[str, np.ndarray]):
        own_parameters = dict(self.named_parameters())
        own_buffers = dict(self.named_buffers())
        missing = (own_parameters.keys() | own_buffers.keys()) - state.keys()
        unexpected = state.keys() - own_parameters.keys() - own_buffers.keys()
        if missing or unexpected:
            raise UnknownIdentifier(
                detail={"missing": sorted(missing), "unexpected": sorted(unexpected)},
                parameter="state_dict",
            )

        for name, parameter in own_parameters.items():
            value = np.asarray(state[name])
            if value.shape != parameter.shape:
                raise InvalidShape(detail=f"Parameter {name!r}: expected {parameter.shape}, got {value.shape}.")
            parameter.data = value.astype(parameter.dtype, copy=True)

        for name, data in own_buffers.items():
            value = np.asarray(state[name])
            if value.shape != data.shape:
                raise InvalidShape(detail=f"Buffer {name!r}: expected {data.shape}, got {value.shape}.")
            data[...] = value

        log.debug("Loaded %s parameters and %s buffers", len(own_parameters), len(own_buffers))


class Sequential(Module):
    def __init__(self, *modules: Module):
        super().__init__()
        self.layers = [self.add_module(str(index), module) for index, module in enumerate(modules)]

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer(x)
        return x
