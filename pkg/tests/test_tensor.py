"""
Tests for the autodiff tensor core: elementwise ops, broadcasting, reductions,
the tape traversal, finite-difference checks and tensor files.
"""

import numpy as np
import pytest

from multiview_cvae.common.errors import CheckpointError, ContractViolationError
from multiview_cvae.tensor import (
    Function,
    Tensor,
    clamp,
    concat,
    default_dtype,
    elementwise,
    get_default_dtype,
    grad_check,
    is_grad_enabled,
    leaky_relu,
    load_array,
    log_softmax,
    matmul,
    no_grad,
    relu,
    save_array,
    sigmoid,
)


def leaf(rng, *shape, low=-1.0, high=1.0):
    return Tensor(rng.uniform(low, high, size=shape), requires_grad=True, dtype="float64")


class TestElementwise:
    """Forward values and broadcasting of the elementwise operations."""

    def test_add_matches_numpy(self, rng):
        a, b = leaf(rng, 3, 4), leaf(rng, 3, 4)
        out = elementwise("add", a, b)
        np.testing.assert_array_equal(out.values, a.values + b.values)

    def test_broadcast_gradient_is_reduced_to_input_shape(self, rng):
        a, b = leaf(rng, 2, 3), leaf(rng, 3)
        (a * b).sum().backward()
        assert b.grad.shape == (3,)
        np.testing.assert_allclose(b.grad, a.values.sum(axis=0))
        np.testing.assert_allclose(a.grad, np.broadcast_to(b.values, (2, 3)))

    def test_incompatible_shapes_raise_with_both_shapes(self, rng):
        with pytest.raises(ContractViolationError, match=r"\(2, 3\).*\(4,\)"):
            elementwise("add", leaf(rng, 2, 3), leaf(rng, 4))

    def test_unknown_op_kind_raises(self, rng):
        with pytest.raises(ContractViolationError, match="unknown elementwise"):
            elementwise("pow", leaf(rng, 2))

    def test_binary_op_without_second_operand_raises(self, rng):
        with pytest.raises(ContractViolationError):
            elementwise("mul", leaf(rng, 2))

    def test_abs_gradient_is_zero_at_zero(self):
        x = Tensor(np.array([-2.0, 0.0, 3.0]), requires_grad=True)
        x.abs().sum().backward()
        np.testing.assert_array_equal(x.grad, [-1.0, 0.0, 1.0])

    def test_sigmoid_saturates_without_overflow(self):
        out = sigmoid(Tensor(np.array([-1000.0, 0.0, 1000.0])))
        np.testing.assert_allclose(out.values, [0.0, 0.5, 1.0])


class TestTape:
    """Reverse-mode traversal of the recorded graph."""

    def test_shared_subexpression_accumulates(self, rng):
        x = leaf(rng, 5)
        y = x * x + x
        y.sum().backward()
        np.testing.assert_allclose(x.grad, 2.0 * x.values + 1.0)

    def test_diamond_graph_visits_each_node_once(self, rng):
        x = leaf(rng, 4)
        h = x.exp()
        (h * h + h).sum().backward()
        e = np.exp(x.values)
        np.testing.assert_allclose(x.grad, 2.0 * e * e + e)

    def test_backward_requires_scalar(self, rng):
        with pytest.raises(ContractViolationError, match="scalar"):
            leaf(rng, 2, 2).square().backward()

    def test_gradients_accumulate_across_backward_calls(self, rng):
        x = leaf(rng, 3)
        (x * 2.0).sum().backward()
        (x * 3.0).sum().backward()
        np.testing.assert_allclose(x.grad, np.full(3, 5.0))

    def test_no_grad_records_nothing(self, rng):
        x = leaf(rng, 3)
        with no_grad():
            assert not is_grad_enabled()
            y = x.square()
        assert is_grad_enabled()
        assert not y.requires_grad
        assert y.node is None

    def test_constant_inputs_receive_no_gradient(self, rng):
        x = leaf(rng, 3)
        c = Tensor(np.ones(3))
        (x * c).sum().backward()
        assert c.grad is None


class TestLinearAlgebraAndShapes:
    def test_matmul_shape_mismatch_names_both_shapes(self, rng):
        with pytest.raises(ContractViolationError, match=r"\(2, 3\).*\(4, 5\)"):
            matmul(leaf(rng, 2, 3), leaf(rng, 4, 5))

    def test_reshape_rejects_wrong_element_count(self, rng):
        with pytest.raises(ContractViolationError, match="cannot reshape"):
            leaf(rng, 2, 3).reshape(4, 2)

    def test_concat_splits_gradient(self, rng):
        a, b = leaf(rng, 2, 3), leaf(rng, 2, 2)
        out = concat([a, b], axis=1)
        assert out.shape == (2, 5)
        (out * Tensor(np.arange(10.0).reshape(2, 5))).sum().backward()
        np.testing.assert_array_equal(a.grad, [[0, 1, 2], [5, 6, 7]])
        np.testing.assert_array_equal(b.grad, [[3, 4], [8, 9]])

    def test_mean_over_axis(self, rng):
        x = leaf(rng, 4, 6)
        np.testing.assert_allclose(x.mean(axis=1).values, x.values.mean(axis=1))

    def test_item_requires_single_element(self, rng):
        with pytest.raises(ContractViolationError):
            leaf(rng, 2).item()


class TestGradCheck:
    """Central differences agree with the analytic gradients of every operation."""

    @pytest.mark.parametrize(
        "fn",
        [
            lambda x: (x * x).sum(),
            lambda x: x.exp().mean(),
            lambda x: (x.square() + 1.0).log().sum(),
            lambda x: sigmoid(x).sum(),
            lambda x: leaky_relu(x, 0.2).square().sum(),
            lambda x: relu(x).square().sum(),
            lambda x: clamp(x, -0.5, 0.5).square().sum(),
            lambda x: (log_softmax(x, axis=-1) * Tensor(np.eye(3, 4))).sum(),
            lambda x: x.reshape(4, 3).sum(axis=0).square().sum(),
        ],
    )
    def test_operation_gradients(self, fn):
        rng = np.random.default_rng(3)
        # keep entries away from the kinks of relu, leaky_relu and clamp
        values = rng.uniform(0.1, 0.45, size=(3, 4)) * rng.choice([-1.0, 1.0], size=(3, 4))
        x = Tensor(values, requires_grad=True, dtype="float64")
        assert grad_check(lambda: fn(x), [x]) < 1e-6

    def test_matmul_gradients(self, rng):
        a, b = leaf(rng, 3, 4), leaf(rng, 4, 2)
        assert grad_check(lambda: matmul(a, b).square().sum(), [a, b]) < 1e-6

    def test_requires_float64(self):
        x = Tensor(np.ones(3), requires_grad=True, dtype="float32")
        with pytest.raises(ContractViolationError, match="float64"):
            grad_check(lambda: x.sum(), [x])

    def test_detects_a_wrong_gradient(self, rng):
        class Broken(Function):
            def forward(self, a):
                return a * a

            def backward(self, grad):
                return (grad * 3.0,)

        x = leaf(rng, 4)
        assert grad_check(lambda: Broken.apply(x).sum(), [x]) > 1e-2

    def test_nan_propagates(self):
        x = Tensor(np.array([-1.0, 2.0]), requires_grad=True, dtype="float64")
        assert np.isnan(grad_check(lambda: x.log().sum(), [x]))

    def test_sampled_entries(self, rng):
        x = leaf(rng, 50)
        err = grad_check(lambda: x.square().sum(), [x], max_entries_per_param=5, rng=rng)
        assert err < 1e-6


class TestDefaultDtype:
    def test_context_sets_and_restores(self):
        assert get_default_dtype() == np.float32
        with default_dtype("float64"):
            assert Tensor([1.0, 2.0]).dtype == np.float64
        assert Tensor([1.0, 2.0]).dtype == np.float32

    def test_float_arrays_keep_their_dtype(self):
        assert Tensor(np.zeros(2, dtype=np.float64)).dtype == np.float64


class TestTensorFiles:
    """Raw little-endian tensor files indexed by a JSON record."""

    def test_save_then_load(self, tmp_path, rng):
        array = rng.standard_normal((3, 5)).astype(np.float32)
        record = save_array(tmp_path, "encoder.weight", array)
        assert record == {
            "name": "encoder.weight",
            "shape": [3, 5],
            "dtype": "float32",
            "file": "encoder.weight.bin",
        }
        assert (tmp_path / "encoder.weight.bin").stat().st_size == 3 * 5 * 4
        np.testing.assert_array_equal(load_array(tmp_path, record), array)

    def test_truncated_file_names_the_tensor(self, tmp_path, rng):
        record = save_array(tmp_path, "head.bias", rng.standard_normal(8))
        path = tmp_path / record["file"]
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="head.bias") as info:
            load_array(tmp_path, record)
        assert info.value.tensor_name == "head.bias"

    def test_missing_file(self, tmp_path):
        record = {"name": "w", "shape": [2], "dtype": "float64", "file": "w.bin"}
        with pytest.raises(CheckpointError, match="missing"):
            load_array(tmp_path, record)

    def test_unsupported_dtype(self, tmp_path):
        with pytest.raises(CheckpointError):
            save_array(tmp_path, "c", np.zeros(2, dtype=np.complex64))


class TestReferenceValues:
    """Small hand-checkable cases."""

    def test_add(self):
        out = elementwise("add", Tensor([1.0, 2.0]), Tensor([3.0, 4.0]))
        np.testing.assert_array_equal(out.values, [4.0, 6.0])

    def test_mul_by_zero_tensor(self):
        x = Tensor(np.array([1.5, -2.0]), requires_grad=True)
        out = x * Tensor(np.zeros(2))
        out.sum().backward()
        np.testing.assert_array_equal(out.values, [0.0, 0.0])
        np.testing.assert_array_equal(x.grad, [0.0, 0.0])

    def test_exp(self):
        out = Tensor(np.array([0.0, np.log(2.0)])).exp()
        np.testing.assert_allclose(out.values, [1.0, 2.0])

    def test_matmul_identity_and_dot(self):
        m = Tensor(np.array([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_array_equal(matmul(Tensor(np.eye(2)), m).values, m.values)
        dot = matmul(Tensor(np.array([[1.0, 2.0]])), Tensor(np.array([[3.0], [4.0]])))
        np.testing.assert_array_equal(dot.values, [[11.0]])

    def test_sum_of_squares_gradient(self):
        x = Tensor(np.array([1.0, 2.0, 3.0]), requires_grad=True)
        x.square().sum().backward()
        np.testing.assert_array_equal(x.grad, [2.0, 4.0, 6.0])

    def test_tensor_used_twice(self):
        x = Tensor(np.array([0.7]), requires_grad=True)
        (x + x).sum().backward()
        np.testing.assert_array_equal(x.grad, [2.0])

    def test_grad_check_of_plain_sum_is_exact(self, rng):
        p = leaf(rng, 7)
        assert grad_check(lambda: p.sum(), [p]) < 1e-9

    def test_composed_graph_with_coarse_step(self, rng):
        a, b = leaf(rng, 3, 2), leaf(rng, 2, 2)

        def f():
            h = sigmoid(matmul(a, b))
            return (h.square() * h.exp()).mean() + log_softmax(h, axis=1).sum()

        assert grad_check(f, [a, b], eps=1e-4) < 1e-5
