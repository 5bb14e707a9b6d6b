"""
Dense tensors with a reverse-mode autodiff tape.

A Tensor wraps a contiguous numpy buffer in row-major N,C,H,W layout. Every differentiable
operation is a Function subclass; applying it records a node pointing at its inputs. The
tape built by one forward pass is consumed and released by one call to backward().
"""

from __future__ import annotations

import threading
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from typing import Any

import numpy as np

from ..common.errors import ContractViolationError

DTYPES: dict[str, type[np.floating]] = {"float32": np.float32, "float64": np.float64}

_state = threading.local()


def get_default_dtype() -> np.dtype:
    return np.dtype(getattr(_state, "dtype", np.float32))


@contextmanager
def default_dtype(dtype: str | type | np.dtype) -> Iterator[None]:
    """Sets the element type of tensors created from Python data in this thread."""
    previous = getattr(_state, "dtype", np.float32)
    _state.dtype = np.dtype(DTYPES.get(dtype, dtype) if isinstance(dtype, str) else dtype)
    try:
        yield
    finally:
        _state.dtype = previous


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Suspends tape recording in this thread (inference, evaluation, finite differences)."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


class Function:
    """
    Base class for differentiable operations.

    Subclasses implement forward on numpy arrays and backward returning one gradient
    per input (None for inputs that do not receive one). Gradients returned for broadcast
    inputs are reduced back to the input's shape by the tape.
    """

    def __init__(self, *inputs: Tensor) -> None:
        self.inputs = inputs

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no forward pass")

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        raise NotImplementedError(f"{type(self).__name__} has no backward pass")

    @classmethod
    def apply(cls, *inputs: Tensor, **kwargs: Any) -> Tensor:
        fn = cls(*inputs)
        out = fn.forward(*(t.data for t in inputs), **kwargs)
        requires_grad = is_grad_enabled() and any(t.requires_grad for t in inputs)
        return Tensor(out, requires_grad=requires_grad, _node=fn if requires_grad else None)


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sums out the dimensions that broadcasting stretched so grad matches shape."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """
    An n-dimensional array participating in the autodiff graph.

    Leaves created by initializers carry requires_grad=True; everything produced by an
    operation on them records the producing Function in ``node``.
    """

    __array_priority__ = 1000

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        dtype: str | type | np.dtype | None = None,
        _node: Function | None = None,
    ) -> None:
        if isinstance(dtype, str):
            dtype = DTYPES[dtype]
        if dtype is None:
            if isinstance(data, np.ndarray) and np.issubdtype(data.dtype, np.floating):
                dtype = data.dtype
            else:
                dtype = get_default_dtype()
        self.data: np.ndarray = np.ascontiguousarray(data, dtype=dtype)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.node = _node

    # ------------- array protocol -------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def values(self) -> np.ndarray:
        return self.data

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractViolationError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> Tensor:
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def __len__(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{flag})"

    # ------------- backward -------------

    def backward(self) -> None:
        """
        Populates ``grad`` on every reachable tensor with requires_grad.

        Gradients accumulate into existing ``grad`` buffers; the graph is released
        afterward, so a second backward over the same graph is not possible.
        """
        if self.data.size != 1:
            raise ContractViolationError(
                f"backward() needs a scalar loss, got shape {self.shape}"
            )
        order = self._topological_order()
        grads: dict[int, np.ndarray] = {id(self): np.ones_like(self.data)}
        for tensor in reversed(order):
            grad = grads.pop(id(tensor), None)
            if grad is None:
                continue
            if tensor.requires_grad:
                tensor.grad = grad.copy() if tensor.grad is None else tensor.grad + grad
            node = tensor.node
            if node is None:
                continue
            for inp, inp_grad in zip(node.inputs, node.backward(grad), strict=True):
                if inp_grad is None or not inp.requires_grad:
                    continue
                inp_grad = unbroadcast(np.asarray(inp_grad, dtype=inp.dtype), inp.shape)
                key = id(inp)
                grads[key] = inp_grad if key not in grads else grads[key] + inp_grad
        for tensor in order:
            tensor.node = None

    def _topological_order(self) -> list[Tensor]:
        """Post-order over the graph; each node appears exactly once."""
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            tensor, expanded = stack.pop()
            if expanded:
                order.append(tensor)
                continue
            if id(tensor) in visited:
                continue
            visited.add(id(tensor))
            stack.append((tensor, True))
            if tensor.node is not None:
                for inp in reversed(tensor.node.inputs):
                    if id(inp) not in visited:
                        stack.append((inp, False))
        return order

    # ------------- operators -------------

    def _wrap(self, other: Any) -> Tensor:
        return other if isinstance(other, Tensor) else Tensor(np.asarray(other, dtype=self.dtype))

    def __add__(self, other: Any) -> Tensor:
        return ops.add(self, self._wrap(other))

    def __radd__(self, other: Any) -> Tensor:
        return ops.add(self._wrap(other), self)

    def __sub__(self, other: Any) -> Tensor:
        return ops.sub(self, self._wrap(other))

    def __rsub__(self, other: Any) -> Tensor:
        return ops.sub(self._wrap(other), self)

    def __mul__(self, other: Any) -> Tensor:
        return ops.mul(self, self._wrap(other))

    def __rmul__(self, other: Any) -> Tensor:
        return ops.mul(self._wrap(other), self)

    def __neg__(self) -> Tensor:
        return ops.negate(self)

    def __matmul__(self, other: Any) -> Tensor:
        return ops.matmul(self, self._wrap(other))

    def sum(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> Tensor:
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def exp(self) -> Tensor:
        return ops.exp(self)

    def log(self) -> Tensor:
        return ops.log(self)

    def square(self) -> Tensor:
        return ops.square(self)

    def abs(self) -> Tensor:
        return ops.abs(self)


def as_tensor(data: Any, dtype: str | type | np.dtype | None = None) -> Tensor:
    """Wraps plain data as a constant tensor; tensors pass through unchanged."""
    if isinstance(data, Tensor):
        return data
    return Tensor(data, requires_grad=False, dtype=dtype)


from . import ops  # noqa: E402
