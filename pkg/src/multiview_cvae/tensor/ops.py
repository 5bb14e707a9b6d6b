"""
Differentiable operations on Tensor.

Binary elementwise operations follow the trailing-dimension broadcast rule: shapes are
aligned from the right and a dimension of extent 1 stretches.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..common.errors import ContractViolationError
from .tensor import Function, Tensor, as_tensor


def broadcast_shape(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    try:
        return tuple(np.broadcast_shapes(a, b))
    except ValueError:
        raise ContractViolationError(f"shapes {a} and {b} are not broadcastable") from None


# ------------- elementwise -------------


class Add(Function):
    def forward(self, a, b):
        broadcast_shape(a.shape, b.shape)
        return a + b

    def backward(self, grad):
        return grad, grad


class Sub(Function):
    def forward(self, a, b):
        broadcast_shape(a.shape, b.shape)
        return a - b

    def backward(self, grad):
        return grad, -grad


class Mul(Function):
    def forward(self, a, b):
        broadcast_shape(a.shape, b.shape)
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return grad * self.b, grad * self.a


class Negate(Function):
    def forward(self, a):
        return -a

    def backward(self, grad):
        return (-grad,)


class Exp(Function):
    def forward(self, a):
        self.out = np.exp(a)
        return self.out

    def backward(self, grad):
        return (grad * self.out,)


class Log(Function):
    def forward(self, a):
        self.a = a
        return np.log(a)

    def backward(self, grad):
        return (grad / self.a,)


class Square(Function):
    def forward(self, a):
        self.a = a
        return a * a

    def backward(self, grad):
        return (2.0 * grad * self.a,)


class Abs(Function):
    # d|x|/dx is taken as 0 at x == 0
    def forward(self, a):
        self.sign = np.sign(a)
        return np.abs(a)

    def backward(self, grad):
        return (grad * self.sign,)


_ELEMENTWISE: dict[str, type[Function]] = {
    "add": Add,
    "sub": Sub,
    "mul": Mul,
    "negate": Negate,
    "exp": Exp,
    "log": Log,
    "square": Square,
    "abs": Abs,
}
_BINARY = {"add", "sub", "mul"}


def elementwise(op_kind: str, a: Tensor, b: Tensor | None = None) -> Tensor:
    """Applies one of add, sub, mul, negate, exp, log, square, abs."""
    fn = _ELEMENTWISE.get(op_kind)
    if fn is None:
        raise ContractViolationError(f"unknown elementwise op_kind={op_kind!r}")
    if op_kind in _BINARY:
        if b is None:
            raise ContractViolationError(f"{op_kind} needs two operands")
        return fn.apply(as_tensor(a), as_tensor(b))
    if b is not None:
        raise ContractViolationError(f"{op_kind} takes a single operand")
    return fn.apply(as_tensor(a))


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def sub(a: Tensor, b: Tensor) -> Tensor:
    return Sub.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def negate(a: Tensor) -> Tensor:
    return Negate.apply(a)


def exp(a: Tensor) -> Tensor:
    return Exp.apply(a)


def log(a: Tensor) -> Tensor:
    return Log.apply(a)


def square(a: Tensor) -> Tensor:
    return Square.apply(a)


def abs(a: Tensor) -> Tensor:  # noqa: A001
    return Abs.apply(a)


# ------------- linear algebra -------------


class MatMul(Function):
    def forward(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ContractViolationError(
                f"matmul needs [m x k] @ [k x n], got {a.shape} and {b.shape}"
            )
        self.a, self.b = a, b
        return a @ b

    def backward(self, grad):
        return grad @ self.b.T, self.a.T @ grad


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return MatMul.apply(as_tensor(a), as_tensor(b))


# ------------- reductions and shape -------------


def _normalize_axes(axis: int | Sequence[int] | None, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return tuple(sorted(a % ndim for a in axes))


class Sum(Function):
    def forward(self, a, axis=None, keepdims=False):
        self.shape = a.shape
        self.axes = _normalize_axes(axis, a.ndim)
        self.keepdims = keepdims
        return np.asarray(a.sum(axis=self.axes, keepdims=keepdims))

    def backward(self, grad):
        if not self.keepdims:
            grad = np.expand_dims(grad, self.axes)
        return (np.broadcast_to(grad, self.shape).copy(),)


def sum(a: Tensor, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    return Sum.apply(a, axis=axis, keepdims=keepdims)


def mean(a: Tensor, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
    return Sum.apply(a, axis=axes, keepdims=keepdims) * (1.0 / count)


class Reshape(Function):
    def forward(self, a, shape=()):
        self.shape = a.shape
        try:
            return a.reshape(shape)
        except ValueError:
            raise ContractViolationError(f"cannot reshape {a.shape} into {shape}") from None

    def backward(self, grad):
        return (grad.reshape(self.shape),)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(a, shape=tuple(shape))


class Concat(Function):
    def forward(self, *arrays, axis=-1):
        ndim = arrays[0].ndim
        self.axis = axis % ndim
        self.splits = np.cumsum([arr.shape[self.axis] for arr in arrays])[:-1]
        try:
            return np.concatenate(arrays, axis=self.axis)
        except ValueError:
            shapes = [arr.shape for arr in arrays]
            raise ContractViolationError(f"cannot concatenate shapes {shapes} on axis {axis}") from None

    def backward(self, grad):
        return tuple(np.split(grad, self.splits, axis=self.axis))


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    return Concat.apply(*tensors, axis=axis)


# ------------- activations -------------


class ReLU(Function):
    def forward(self, a):
        self.mask = a > 0
        return np.where(self.mask, a, 0).astype(a.dtype)

    def backward(self, grad):
        return (grad * self.mask,)


class LeakyReLU(Function):
    def forward(self, a, slope=0.2):
        self.scale = np.where(a > 0, 1.0, slope).astype(a.dtype)
        return a * self.scale

    def backward(self, grad):
        return (grad * self.scale,)


class Sigmoid(Function):
    def forward(self, a):
        # tanh form avoids overflow for large |a|
        self.out = (0.5 * (1.0 + np.tanh(0.5 * a))).astype(a.dtype)
        return self.out

    def backward(self, grad):
        return (grad * self.out * (1.0 - self.out),)


class Clamp(Function):
    def forward(self, a, low=-np.inf, high=np.inf):
        self.mask = (a >= low) & (a <= high)
        return np.clip(a, low, high)

    def backward(self, grad):
        return (grad * self.mask,)


class LogSoftmax(Function):
    def forward(self, a, axis=-1):
        self.axis = axis
        shifted = a - a.max(axis=axis, keepdims=True)
        self.out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
        return self.out

    def backward(self, grad):
        softmax = np.exp(self.out)
        return (grad - softmax * grad.sum(axis=self.axis, keepdims=True),)


def relu(a: Tensor) -> Tensor:
    return ReLU.apply(a)


def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    if not 0.0 < slope <= 1.0:
        raise ContractViolationError(f"leaky_relu slope={slope} outside (0, 1]")
    return LeakyReLU.apply(a, slope=slope)


def sigmoid(a: Tensor) -> Tensor:
    return Sigmoid.apply(a)


def clamp(a: Tensor, low: float, high: float) -> Tensor:
    return Clamp.apply(a, low=low, high=high)


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    return LogSoftmax.apply(a, axis=axis)
