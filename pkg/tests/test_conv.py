"""
Tests for 2-D convolution and transposed convolution.
"""

import numpy as np
import pytest

from multiview_cvae.common.errors import ContractViolationError
from multiview_cvae.tensor import (
    Tensor,
    conv2d,
    conv_output_extent,
    conv_transpose2d,
    conv_transpose_output_extent,
    grad_check,
)


def naive_conv2d(x, w, b, stride, pad):
    """Direct loop over output positions; reference for the strided implementation."""
    n, c, h, width = x.shape
    f, _, k, _ = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    ho = (h + 2 * pad - k) // stride + 1
    wo = (width + 2 * pad - k) // stride + 1
    out = np.zeros((n, f, ho, wo))
    for i in range(ho):
        for j in range(wo):
            patch = xp[:, :, i * stride:i * stride + k, j * stride:j * stride + k]
            out[:, :, i, j] = np.tensordot(patch, w, axes=([1, 2, 3], [1, 2, 3])) + b
    return out


def param(rng, *shape):
    return Tensor(rng.standard_normal(shape), requires_grad=True, dtype="float64")


class TestOutputExtent:
    def test_stride_two_halves(self):
        assert conv_output_extent(32, 4, 2, 1) == 16
        assert conv_output_extent(8, 4, 2, 1) == 4

    def test_transpose_doubles(self):
        assert conv_transpose_output_extent(16, 4, 2, 1) == 32
        assert conv_transpose_output_extent(4, 4, 2, 1) == 8

    def test_full_scale_geometry_reaches_four(self):
        size = 256
        for _ in range(6):
            size = conv_output_extent(size, 4, 2, 1)
        assert size == 4
        for _ in range(6):
            size = conv_transpose_output_extent(size, 4, 2, 1)
        assert size == 256


class TestConv2d:
    @pytest.mark.parametrize("stride,pad", [(1, 0), (2, 1), (1, 1), (2, 0)])
    def test_matches_naive_loop(self, rng, stride, pad):
        x = rng.standard_normal((2, 3, 8, 8))
        w = rng.standard_normal((4, 3, 3, 3))
        b = rng.standard_normal(4)
        out = conv2d(Tensor(x), Tensor(w), Tensor(b), stride=stride, pad=pad)
        np.testing.assert_allclose(out.values, naive_conv2d(x, w, b, stride, pad), atol=1e-12)

    def test_channel_mismatch_raises(self, rng):
        with pytest.raises(ContractViolationError, match="input channels"):
            conv2d(Tensor(rng.standard_normal((1, 2, 8, 8))), param(rng, 4, 3, 4, 4))

    def test_kernel_larger_than_input_raises(self, rng):
        with pytest.raises(ContractViolationError, match="larger than padded input"):
            conv2d(Tensor(rng.standard_normal((1, 1, 2, 2))), param(rng, 1, 1, 4, 4))

    def test_non_square_kernel_raises(self, rng):
        with pytest.raises(ContractViolationError, match="square"):
            conv2d(Tensor(rng.standard_normal((1, 1, 8, 8))), param(rng, 1, 1, 3, 2))

    def test_gradients(self, rng):
        x = param(rng, 2, 2, 6, 6)
        w = param(rng, 3, 2, 4, 4)
        b = param(rng, 3)
        target = Tensor(rng.standard_normal((2, 3, 3, 3)))

        def loss():
            return (conv2d(x, w, b, stride=2, pad=1) * target).sum()

        assert grad_check(loss, [x, w, b]) < 1e-6


class TestConvTranspose2d:
    def test_output_shape(self, rng):
        x = Tensor(rng.standard_normal((2, 3, 4, 4)))
        out = conv_transpose2d(x, param(rng, 3, 5, 4, 4), param(rng, 5), stride=2, pad=1)
        assert out.shape == (2, 5, 8, 8)

    def test_adjoint_identity(self, rng):
        """<conv(x, w), y> == <x, conv_transpose(y, w)> for the same weight."""
        for stride, pad, size in [(2, 1, 8), (1, 0, 6), (2, 1, 16)]:
            x = rng.standard_normal((2, 3, size, size))
            w = rng.standard_normal((4, 3, 4, 4))
            cx = conv2d(Tensor(x), Tensor(w), stride=stride, pad=pad).values
            y = rng.standard_normal(cx.shape)
            ty = conv_transpose2d(Tensor(y), Tensor(w), stride=stride, pad=pad).values
            assert ty.shape == x.shape
            lhs, rhs = float(np.sum(cx * y)), float(np.sum(x * ty))
            assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(lhs))

    def test_gradients(self, rng):
        x = param(rng, 2, 3, 3, 3)
        w = param(rng, 3, 2, 4, 4)
        b = param(rng, 2)
        target = Tensor(rng.standard_normal((2, 2, 6, 6)))

        def loss():
            return (conv_transpose2d(x, w, b, stride=2, pad=1) * target).sum()

        assert grad_check(loss, [x, w, b]) < 1e-6

    def test_channel_mismatch_raises(self, rng):
        with pytest.raises(ContractViolationError):
            conv_transpose2d(Tensor(rng.standard_normal((1, 2, 4, 4))), param(rng, 3, 1, 4, 4))


class TestReferenceValues:
    def test_all_ones_window_sums(self):
        x = Tensor(np.arange(1.0, 10.0).reshape(1, 1, 3, 3))
        w = Tensor(np.ones((1, 1, 2, 2)))
        out = conv2d(x, w, Tensor(np.zeros(1)), stride=1, pad=0)
        np.testing.assert_array_equal(out.values[0, 0], [[12.0, 16.0], [24.0, 28.0]])

    def test_unit_kernel_of_two_doubles(self, rng):
        x = rng.standard_normal((2, 1, 5, 5))
        out = conv2d(Tensor(x), Tensor(np.full((1, 1, 1, 1), 2.0)), stride=1, pad=0)
        np.testing.assert_array_equal(out.values, 2.0 * x)

    def test_transpose_identity_kernel(self, rng):
        x = rng.standard_normal((1, 2, 4, 4))
        w = Tensor(np.eye(2).reshape(2, 2, 1, 1))
        out = conv_transpose2d(Tensor(x), w, stride=1, pad=0)
        np.testing.assert_array_equal(out.values, x)

    def test_six_transposed_stages_reach_full_scale(self):
        size = 4
        for _ in range(6):
            size = conv_transpose_output_extent(size, 4, 2, 1)
        assert size == 256
