"""
2-D convolution and transposed convolution with zero padding, N,C,H,W layout.

The forward convolution gathers every k x k window with a strided view and contracts it
against the kernel in one BLAS call (im2col without an explicit copy loop). The input
gradient scatters back one kernel offset at a time, which keeps the summation order fixed
and the result deterministic. conv_transpose2d is implemented as the exact adjoint:
its forward is the input-gradient pass of conv2d and vice versa.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..common.errors import ContractViolationError
from .tensor import Function, Tensor, as_tensor


def conv_output_extent(extent: int, kernel: int, stride: int, pad: int) -> int:
    return (extent + 2 * pad - kernel) // stride + 1


def conv_transpose_output_extent(extent: int, kernel: int, stride: int, pad: int) -> int:
    return (extent - 1) * stride - 2 * pad + kernel


def _check_geometry(x_shape, w_shape, stride: int, pad: int, channel_axis: int) -> None:
    if len(x_shape) != 4 or len(w_shape) != 4:
        raise ContractViolationError(
            f"convolution needs 4-D input and weight, got {x_shape} and {w_shape}"
        )
    if w_shape[2] != w_shape[3]:
        raise ContractViolationError(f"kernel must be square, got {w_shape[2]}x{w_shape[3]}")
    if x_shape[1] != w_shape[channel_axis]:
        raise ContractViolationError(
            f"input channels {x_shape[1]} do not match weight {w_shape} (axis {channel_axis})"
        )
    if stride < 1 or pad < 0:
        raise ContractViolationError(f"invalid stride={stride} pad={pad}")


def _pad(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def _windows(x: np.ndarray, kernel: int, stride: int, pad: int) -> np.ndarray:
    """[N, C, H, W] -> read-only view [N, C, H', W', k, k]."""
    return sliding_window_view(_pad(x, pad), (kernel, kernel), axis=(2, 3))[:, :, ::stride, ::stride]


def correlate(x: np.ndarray, w: np.ndarray, stride: int, pad: int) -> np.ndarray:
    """Cross-correlation of x [N, C, H, W] with w [F, C, k, k] -> [N, F, H', W']."""
    out = np.tensordot(_windows(x, w.shape[2], stride, pad), w, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def correlate_input_grad(
    dout: np.ndarray, w: np.ndarray, x_shape: tuple[int, ...], stride: int, pad: int
) -> np.ndarray:
    """Adjoint of correlate w.r.t. x: dout [N, F, H', W'] -> [N, C, H, W]."""
    n, c, h, width = x_shape
    k = w.shape[2]
    ho, wo = dout.shape[2], dout.shape[3]
    dxp = np.zeros((n, c, h + 2 * pad, width + 2 * pad), dtype=np.result_type(dout, w))
    for i in range(k):
        for j in range(k):
            contrib = np.tensordot(dout, w[:, :, i, j], axes=([1], [0]))  # N, H', W', C
            dxp[:, :, i:i + stride * (ho - 1) + 1:stride, j:j + stride * (wo - 1) + 1:stride] += (
                contrib.transpose(0, 3, 1, 2)
            )
    if pad:
        dxp = dxp[:, :, pad:pad + h, pad:pad + width]
    return np.ascontiguousarray(dxp)


def correlate_weight_grad(
    x: np.ndarray, dout: np.ndarray, kernel: int, stride: int, pad: int
) -> np.ndarray:
    """Gradient of correlate w.r.t. w: -> [F, C, k, k]."""
    windows = _windows(x, kernel, stride, pad)
    return np.ascontiguousarray(np.tensordot(dout, windows, axes=([0, 2, 3], [0, 2, 3])))


class Conv2d(Function):
    def forward(self, x, w, b=None, stride=1, pad=0):
        _check_geometry(x.shape, w.shape, stride, pad, channel_axis=1)
        k = w.shape[2]
        if x.shape[2] + 2 * pad < k or x.shape[3] + 2 * pad < k:
            raise ContractViolationError(
                f"kernel {k}x{k} larger than padded input {x.shape[2:]} (pad={pad})"
            )
        self.x, self.w, self.stride, self.pad = x, w, stride, pad
        self.has_bias = b is not None
        out = correlate(x, w, stride, pad)
        if b is not None:
            out += b.reshape(1, -1, 1, 1)
        return out

    def backward(self, grad):
        dx = correlate_input_grad(grad, self.w, self.x.shape, self.stride, self.pad)
        dw = correlate_weight_grad(self.x, grad, self.w.shape[2], self.stride, self.pad)
        if self.has_bias:
            return dx, dw, grad.sum(axis=(0, 2, 3))
        return dx, dw


class ConvTranspose2d(Function):
    def forward(self, x, w, b=None, stride=1, pad=0):
        _check_geometry(x.shape, w.shape, stride, pad, channel_axis=0)
        k = w.shape[2]
        n, _, h, width = x.shape
        ho = conv_transpose_output_extent(h, k, stride, pad)
        wo = conv_transpose_output_extent(width, k, stride, pad)
        if ho <= 0 or wo <= 0:
            raise ContractViolationError(
                f"transposed convolution output extent {ho}x{wo} is not positive"
            )
        self.x, self.w, self.stride, self.pad = x, w, stride, pad
        self.has_bias = b is not None
        out = correlate_input_grad(x, w, (n, w.shape[1], ho, wo), stride, pad)
        if b is not None:
            out += b.reshape(1, -1, 1, 1)
        return out

    def backward(self, grad):
        dx = correlate(grad, self.w, self.stride, self.pad)
        dw = correlate_weight_grad(grad, self.x, self.w.shape[2], self.stride, self.pad)
        if self.has_bias:
            return dx, dw, grad.sum(axis=(0, 2, 3))
        return dx, dw


def conv2d(
    x: Tensor, weight: Tensor, bias: Tensor | None = None, stride: int = 1, pad: int = 0
) -> Tensor:
    """input [N, C, H, W], weight [F, C, k, k], bias [F] -> [N, F, H', W']."""
    inputs = (as_tensor(x), weight) if bias is None else (as_tensor(x), weight, bias)
    return Conv2d.apply(*inputs, stride=stride, pad=pad)


def conv_transpose2d(
    x: Tensor, weight: Tensor, bias: Tensor | None = None, stride: int = 1, pad: int = 0
) -> Tensor:
    """input [N, C, H, W], weight [C, F, k, k], bias [F] -> [N, F, H', W']."""
    inputs = (as_tensor(x), weight) if bias is None else (as_tensor(x), weight, bias)
    return ConvTranspose2d.apply(*inputs, stride=stride, pad=pad)
