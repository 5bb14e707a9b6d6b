"""
Layers built from LayerSpec geometry, plus a minimal Module container.

Modules expose their parameters in a deterministic order (registration order, depth
first) so checkpoints and optimizer state line up across runs.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from ..common.errors import ContractViolationError
from ..tensor import (
    Tensor,
    conv2d,
    conv_output_extent,
    conv_transpose2d,
    conv_transpose_output_extent,
    leaky_relu,
    relu,
    sigmoid,
)
from .init import xavier_init, zeros_init

LAYER_KINDS = ("conv", "conv_transpose", "linear", "activation")
ACTIVATIONS = ("leaky_relu", "relu", "sigmoid", "none")


class Module:
    """Holds named parameter tensors and child modules."""

    def __init__(self) -> None:
        self._params: dict[str, Tensor] = {}
        self._children: dict[str, Module] = {}

    def register_parameter(self, name: str, tensor: Tensor) -> Tensor:
        self._params[name] = tensor
        return tensor

    def register_module(self, name: str, module: Module) -> Module:
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, tensor in self._params.items():
            yield f"{prefix}{name}", tensor
        for name, child in self._children.items():
            yield from child.named_parameters(f"{prefix}{name}.")

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.named_parameters()]

    def parameter_count(self) -> int:
        return sum(t.size for t in self.parameters())

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.zero_grad()

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: tensor.data.copy() for name, tensor in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        unexpected = sorted(set(state) - set(own))
        if missing or unexpected:
            raise ContractViolationError(
                f"state mismatch: missing={missing[:5]} unexpected={unexpected[:5]}"
            )
        for name, tensor in own.items():
            value = np.asarray(state[name])
            if value.shape != tensor.shape:
                raise ContractViolationError(
                    f"parameter {name} has shape {tensor.shape}, checkpoint has {value.shape}"
                )
            tensor.data[...] = value.astype(tensor.dtype, copy=False)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_size: int = 0
    out_size: int = 0
    kernel: int = 4
    stride: int = 2
    pad: int = 1
    activation: str = "none"
    slope: float = 0.2

    def __post_init__(self) -> None:
        if self.kind not in LAYER_KINDS:
            raise ContractViolationError(f"unknown layer kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise ContractViolationError(f"unknown activation {self.activation!r}")
        if self.activation == "leaky_relu" and not 0.0 < self.slope <= 1.0:
            raise ContractViolationError(f"leaky slope={self.slope} outside (0, 1]")
        if self.kind != "activation" and (self.in_size <= 0 or self.out_size <= 0):
            raise ContractViolationError(
                f"{self.kind} layer needs positive sizes, got {self.in_size}->{self.out_size}"
            )
        if self.kind in ("conv", "conv_transpose") and (
            self.kernel <= 0 or self.stride <= 0 or self.pad < 0
        ):
            raise ContractViolationError(
                f"invalid geometry kernel={self.kernel} stride={self.stride} pad={self.pad}"
            )

    def output_shape(self, input_shape: Sequence[int]) -> tuple[int, ...]:
        """Shape the layer produces for a given input shape (batch axis included)."""
        shape = tuple(input_shape)
        if self.kind == "linear":
            return (*shape[:-1], self.out_size)
        if self.kind == "conv":
            n, _, h, w = shape
            return (
                n,
                self.out_size,
                conv_output_extent(h, self.kernel, self.stride, self.pad),
                conv_output_extent(w, self.kernel, self.stride, self.pad),
            )
        if self.kind == "conv_transpose":
            n, _, h, w = shape
            return (
                n,
                self.out_size,
                conv_transpose_output_extent(h, self.kernel, self.stride, self.pad),
                conv_transpose_output_extent(w, self.kernel, self.stride, self.pad),
            )
        return shape


def activate(x: Tensor, activation: str, slope: float = 0.2) -> Tensor:
    if activation == "leaky_relu":
        return leaky_relu(x, slope)
    if activation == "relu":
        return relu(x)
    if activation == "sigmoid":
        return sigmoid(x)
    if activation == "none":
        return x
    raise ContractViolationError(f"unknown activation {activation!r}")


class Layer(Module):
    def __init__(self, spec: LayerSpec) -> None:
        super().__init__()
        self.spec = spec

    def forward(self, x: Tensor) -> Tensor:
        return activate(self._linear_part(x), self.spec.activation, self.spec.slope)

    def _linear_part(self, x: Tensor) -> Tensor:
        return x


class Linear(Layer):
    """weight [in, out], bias [out]."""

    def __init__(self, spec: LayerSpec, rng: np.random.Generator) -> None:
        super().__init__(spec)
        self.weight = self.register_parameter(
            "weight", xavier_init(spec.in_size, spec.out_size, (spec.in_size, spec.out_size), rng)
        )
        self.bias = self.register_parameter("bias", zeros_init((spec.out_size,)))

    def _linear_part(self, x: Tensor) -> Tensor:
        if x.ndim != 2 or x.shape[1] != self.spec.in_size:
            raise ContractViolationError(
                f"linear layer expects [B, {self.spec.in_size}], got {x.shape}"
            )
        return x @ self.weight + self.bias


class Conv2d(Layer):
    """weight [out, in, k, k]."""

    def __init__(self, spec: LayerSpec, rng: np.random.Generator) -> None:
        super().__init__(spec)
        k = spec.kernel
        self.weight = self.register_parameter(
            "weight",
            xavier_init(spec.in_size * k * k, spec.out_size * k * k, (spec.out_size, spec.in_size, k, k), rng),
        )
        self.bias = self.register_parameter("bias", zeros_init((spec.out_size,)))

    def _linear_part(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=self.spec.stride, pad=self.spec.pad)


class ConvTranspose2d(Layer):
    """weight [in, out, k, k]."""

    def __init__(self, spec: LayerSpec, rng: np.random.Generator) -> None:
        super().__init__(spec)
        k = spec.kernel
        self.weight = self.register_parameter(
            "weight",
            xavier_init(spec.in_size * k * k, spec.out_size * k * k, (spec.in_size, spec.out_size, k, k), rng),
        )
        self.bias = self.register_parameter("bias", zeros_init((spec.out_size,)))

    def _linear_part(self, x: Tensor) -> Tensor:
        return conv_transpose2d(x, self.weight, self.bias, stride=self.spec.stride, pad=self.spec.pad)


class Activation(Layer):
    pass


def build_layer(spec: LayerSpec, rng: np.random.Generator) -> Layer:
    if spec.kind == "linear":
        return Linear(spec, rng)
    if spec.kind == "conv":
        return Conv2d(spec, rng)
    if spec.kind == "conv_transpose":
        return ConvTranspose2d(spec, rng)
    return Activation(spec)


class Sequential(Module):
    def __init__(self, specs: Sequence[LayerSpec], rng: np.random.Generator) -> None:
        super().__init__()
        self.specs = tuple(specs)
        self.layers = [
            self.register_module(str(i), build_layer(spec, rng)) for i, spec in enumerate(self.specs)
        ]

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer(x)
        return x

    def output_shape(self, input_shape: Sequence[int]) -> tuple[int, ...]:
        shape = tuple(input_shape)
        for spec in self.specs:
            shape = spec.output_shape(shape)
        return shape
