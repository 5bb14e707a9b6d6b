"""
Tests for initializers, layers, VAE losses and the Adam optimizer.
"""

import numpy as np
import pytest

from multiview_cvae.common.errors import ContractViolationError
from multiview_cvae.nn import (
    Adam,
    AdamState,
    LayerSpec,
    Linear,
    Sequential,
    adam_step,
    cross_entropy,
    kl_standard_normal,
    l1_loss,
    one_hot,
    reparameterize,
    xavier_bound,
    xavier_init,
)
from multiview_cvae.tensor import Tensor, default_dtype, grad_check


class TestInit:
    def test_xavier_bound(self):
        assert xavier_bound(3, 3) == pytest.approx(1.0)

    def test_xavier_values_stay_in_bound(self, rng):
        w = xavier_init(100, 50, (100, 50), rng)
        bound = xavier_bound(100, 50)
        assert w.requires_grad
        assert np.all(np.abs(w.values) <= bound)
        assert w.values.std() == pytest.approx(bound / np.sqrt(3.0), rel=0.05)

    def test_same_generator_state_same_values(self):
        a = xavier_init(4, 4, (4, 4), np.random.default_rng(9))
        b = xavier_init(4, 4, (4, 4), np.random.default_rng(9))
        np.testing.assert_array_equal(a.values, b.values)

    def test_non_positive_fan_raises(self, rng):
        with pytest.raises(ContractViolationError):
            xavier_init(0, 4, (0, 4), rng)


class TestLayerSpec:
    def test_unknown_kind(self):
        with pytest.raises(ContractViolationError, match="unknown layer kind"):
            LayerSpec(kind="pool", in_size=1, out_size=1)

    def test_unknown_activation(self):
        with pytest.raises(ContractViolationError, match="unknown activation"):
            LayerSpec(kind="linear", in_size=1, out_size=1, activation="tanh")

    def test_non_positive_sizes(self):
        with pytest.raises(ContractViolationError):
            LayerSpec(kind="conv", in_size=0, out_size=4)

    def test_output_shapes(self):
        conv = LayerSpec(kind="conv", in_size=1, out_size=8)
        up = LayerSpec(kind="conv_transpose", in_size=8, out_size=1)
        assert conv.output_shape((5, 1, 32, 32)) == (5, 8, 16, 16)
        assert up.output_shape((5, 8, 16, 16)) == (5, 1, 32, 32)
        assert LayerSpec(kind="linear", in_size=6, out_size=3).output_shape((2, 6)) == (2, 3)


class TestLayers:
    def test_linear_rejects_wrong_width(self, rng):
        layer = Linear(LayerSpec(kind="linear", in_size=4, out_size=2), rng)
        with pytest.raises(ContractViolationError, match=r"\[B, 4\]"):
            layer(Tensor(np.ones((3, 5))))

    def test_sequential_parameter_order_is_deterministic(self, rng):
        specs = [
            LayerSpec(kind="conv", in_size=1, out_size=2, activation="leaky_relu"),
            LayerSpec(kind="conv_transpose", in_size=2, out_size=1, activation="sigmoid"),
        ]
        net = Sequential(specs, rng)
        names = [name for name, _ in net.named_parameters()]
        assert names == ["0.weight", "0.bias", "1.weight", "1.bias"]
        assert net.output_shape((3, 1, 8, 8)) == (3, 1, 8, 8)
        out = net(Tensor(rng.uniform(size=(3, 1, 8, 8))))
        assert out.shape == (3, 1, 8, 8)
        assert np.all((out.values > 0) & (out.values < 1))

    def test_state_dict_round_trip_and_validation(self, rng):
        specs = [LayerSpec(kind="linear", in_size=3, out_size=2)]
        net = Sequential(specs, rng)
        other = Sequential(specs, np.random.default_rng(99))
        other.load_state_dict(net.state_dict())
        for (_, a), (_, b) in zip(net.named_parameters(), other.named_parameters(), strict=True):
            np.testing.assert_array_equal(a.values, b.values)

        with pytest.raises(ContractViolationError, match="missing"):
            other.load_state_dict({"0.weight": np.zeros((3, 2))})
        bad = net.state_dict()
        bad["0.weight"] = np.zeros((2, 3))
        with pytest.raises(ContractViolationError, match="shape"):
            other.load_state_dict(bad)

    @pytest.mark.parametrize(
        "spec,shape",
        [
            (LayerSpec(kind="linear", in_size=5, out_size=3, activation="leaky_relu"), (4, 5)),
            (LayerSpec(kind="conv", in_size=2, out_size=3, activation="relu"), (2, 2, 6, 6)),
            (
                LayerSpec(kind="conv_transpose", in_size=3, out_size=2, activation="sigmoid"),
                (2, 3, 3, 3),
            ),
        ],
    )
    def test_layer_gradients(self, spec, shape):
        rng = np.random.default_rng(4)
        with default_dtype("float64"):
            net = Sequential([spec], rng)
            x = Tensor(rng.standard_normal(shape), requires_grad=True)
        target = rng.standard_normal(net.output_shape(shape))
        params = [x, *net.parameters()]

        def loss():
            return (net(x) * Tensor(target)).sum()

        assert grad_check(loss, params) < 1e-4


class TestLosses:
    def test_kl_zero_at_prior(self):
        mu = Tensor(np.zeros((3, 5)))
        logvar = Tensor(np.zeros((3, 5)))
        assert kl_standard_normal(mu, logvar).item() == 0.0

    def test_kl_closed_form_single(self):
        mu = Tensor(np.array([1.0, -2.0]), dtype="float64")
        logvar = Tensor(np.array([0.5, -0.3]), dtype="float64")
        expected = 0.5 * sum(m * m + np.exp(v) - 1 - v for m, v in zip([1.0, -2.0], [0.5, -0.3]))
        assert kl_standard_normal(mu, logvar).item() == pytest.approx(expected)

    def test_kl_batch_is_mean_of_sums(self, rng):
        mu = rng.standard_normal((4, 3))
        lv = rng.uniform(-1, 1, (4, 3))
        per = 0.5 * (mu**2 + np.exp(lv) - 1 - lv).sum(axis=1)
        value = kl_standard_normal(Tensor(mu), Tensor(lv)).item()
        assert value == pytest.approx(per.mean())

    def test_kl_matches_monte_carlo(self):
        """Closed form against a 10^6-sample estimate of E_q[log q - log p]."""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            mu = rng.uniform(0.5, 1.5, size=3) * rng.choice([-1.0, 1.0], size=3)
            logvar = rng.uniform(-1.0, 1.0, size=3)
            std = np.exp(0.5 * logvar)
            z = mu + std * rng.standard_normal((1_000_000, 3))
            log_q = -0.5 * (((z - mu) / std) ** 2 + logvar + np.log(2 * np.pi))
            log_p = -0.5 * (z**2 + np.log(2 * np.pi))
            estimate = float((log_q - log_p).sum(axis=1).mean())
            exact = kl_standard_normal(Tensor(mu), Tensor(logvar)).item()
            assert abs(estimate - exact) <= 0.02 * exact

    def test_kl_shape_mismatch(self):
        with pytest.raises(ContractViolationError, match="differ"):
            kl_standard_normal(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 4))))

    def test_kl_gradients(self, rng):
        mu = Tensor(rng.standard_normal((3, 4)), requires_grad=True, dtype="float64")
        lv = Tensor(rng.uniform(-1, 1, (3, 4)), requires_grad=True, dtype="float64")
        assert grad_check(lambda: kl_standard_normal(mu, lv), [mu, lv]) < 1e-6

    def test_reparameterize_statistics(self):
        mu = Tensor(np.full((200_000, 1), 2.0), dtype="float64")
        logvar = Tensor(np.full((200_000, 1), np.log(0.25)), dtype="float64")
        z = reparameterize(mu, logvar, np.random.default_rng(0)).values
        assert z.mean() == pytest.approx(2.0, abs=0.01)
        assert z.std() == pytest.approx(0.5, abs=0.01)

    def test_reparameterize_is_reproducible_per_generator(self):
        mu, lv = Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3)))
        a = reparameterize(mu, lv, np.random.default_rng(5)).values
        b = reparameterize(mu, lv, np.random.default_rng(5)).values
        np.testing.assert_array_equal(a, b)

    def test_reparameterize_gradients(self, rng):
        mu = Tensor(rng.standard_normal((2, 3)), requires_grad=True, dtype="float64")
        lv = Tensor(rng.uniform(-1, 1, (2, 3)), requires_grad=True, dtype="float64")

        def loss():
            return reparameterize(mu, lv, np.random.default_rng(8)).square().sum()

        assert grad_check(loss, [mu, lv]) < 1e-6

    def test_l1_reductions(self):
        pred = Tensor(np.array([[1.0, 2.0], [3.0, 4.0]]))
        target = np.array([[0.0, 0.0], [3.0, 2.0]])
        assert l1_loss(pred, target).item() == pytest.approx(5.0 / 4.0)
        assert l1_loss(pred, target, reduction="per_sample_sum").item() == pytest.approx(2.5)

    def test_l1_unknown_reduction(self):
        with pytest.raises(ContractViolationError, match="reduction"):
            l1_loss(Tensor(np.zeros(2)), np.zeros(2), reduction="max")

    def test_l1_shape_mismatch(self):
        with pytest.raises(ContractViolationError):
            l1_loss(Tensor(np.zeros((2, 3))), np.zeros((3, 2)))

    def test_one_hot_rejects_out_of_range(self):
        with pytest.raises(ContractViolationError, match="outside"):
            one_hot(np.array([0, 3]), 3)

    def test_cross_entropy_uniform_logits(self):
        logits = Tensor(np.zeros((4, 5)))
        assert cross_entropy(logits, np.array([0, 1, 2, 3])).item() == pytest.approx(np.log(5))

    def test_cross_entropy_gradients(self, rng):
        logits = Tensor(rng.standard_normal((4, 3)), requires_grad=True, dtype="float64")
        labels = np.array([0, 2, 1, 2])
        assert grad_check(lambda: cross_entropy(logits, labels), [logits]) < 1e-6


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        p = Tensor(np.array([1.0, -1.0]), requires_grad=True, dtype="float64")
        state = AdamState(lr=0.1)
        adam_step([p], [np.array([0.5, -2.0])], state)
        # bias-corrected first step is lr * sign(g)
        np.testing.assert_allclose(p.values, [0.9, -0.9], atol=1e-6)
        assert state.step_count == 1

    def test_none_gradient_is_zero(self):
        p = Tensor(np.array([1.0]), requires_grad=True, dtype="float64")
        adam_step([p], [None], AdamState(lr=0.1))
        np.testing.assert_array_equal(p.values, [1.0])

    def test_zero_learning_rate_leaves_parameters_bitwise(self, rng):
        values = rng.standard_normal(6)
        p = Tensor(values.copy(), requires_grad=True, dtype="float64")
        state = AdamState(lr=0.0)
        for _ in range(3):
            adam_step([p], [rng.standard_normal(6)], state)
        assert p.values.tobytes() == values.tobytes()

    def test_shape_mismatch_raises(self):
        p = Tensor(np.zeros(3), requires_grad=True)
        with pytest.raises(ContractViolationError, match="shape"):
            adam_step([p], [np.zeros(4)], AdamState())

    def test_count_mismatch_raises(self):
        p = Tensor(np.zeros(3), requires_grad=True)
        with pytest.raises(ContractViolationError):
            adam_step([p], [], AdamState())

    def test_minimizes_quadratic(self):
        p = Tensor(np.array([3.0, -2.0]), requires_grad=True, dtype="float64")
        opt = Adam([p], lr=0.05)
        for _ in range(2000):
            opt.zero_grad()
            (p.square()).sum().backward()
            opt.step()
        assert float((p.values**2).sum()) < 1e-2


class TestReferenceValues:
    def test_normal_init_moments(self):
        from multiview_cvae.nn import normal_init

        w = normal_init((100_000,), np.random.default_rng(11), dtype="float64").values
        assert abs(w.mean()) < 0.02
        assert w.var() == pytest.approx(1.0, rel=0.05)

    def test_xavier_variance(self):
        w = xavier_init(3, 5, (100_000,), np.random.default_rng(12), dtype="float64").values
        assert w.var() == pytest.approx(2.0 / 8.0, rel=0.05)

    def test_reparameterize_with_vanishing_variance(self):
        mu = Tensor(np.array([0.3, -1.2]), dtype="float64")
        logvar = Tensor(np.array([-1e6, -1e6]), dtype="float64")
        z = reparameterize(mu, logvar, np.random.default_rng(0)).values
        np.testing.assert_allclose(z, mu.values, atol=0.05)

    def test_reparameterize_unit_variance(self):
        mu, lv = Tensor(np.zeros(100_000)), Tensor(np.zeros(100_000))
        z = reparameterize(mu, lv, np.random.default_rng(1)).values
        assert z.var() == pytest.approx(1.0, rel=0.05)

    def test_reparameterize_mean_gradient_is_one(self):
        mu = Tensor(np.zeros(4), requires_grad=True, dtype="float64")
        lv = Tensor(np.zeros(4), dtype="float64")
        reparameterize(mu, lv, np.random.default_rng(2)).sum().backward()
        np.testing.assert_array_equal(mu.grad, np.ones(4))

    def test_kl_unit_mean(self):
        value = kl_standard_normal(Tensor(np.array([1.0])), Tensor(np.array([0.0]))).item()
        assert value == pytest.approx(0.5)

    def test_l1_values(self):
        assert l1_loss(Tensor(np.array([0.0, 2.0])), np.array([1.0, 0.0])).item() == 1.5
        assert l1_loss(Tensor(np.array([0.5, 2.0])), np.array([0.5, 2.0])).item() == 0.0

    def test_l1_gradient_is_sign_over_n(self):
        pred = Tensor(np.array([0.3, -0.4, 2.0, 1.0]), requires_grad=True, dtype="float64")
        target = np.array([0.0, 0.0, 3.0, 0.5])
        l1_loss(pred, target).backward()
        np.testing.assert_allclose(pred.grad, np.sign(pred.values - target) / 4.0)
        assert grad_check(lambda: l1_loss(pred, target), [pred]) < 1e-5

    def test_adam_constant_gradient_steps_by_learning_rate(self):
        p = Tensor(np.array([0.0]), requires_grad=True, dtype="float64")
        state = AdamState(lr=0.01)
        for _ in range(50):
            before = p.values.copy()
            adam_step([p], [np.array([4.0])], state)
        assert abs(before[0] - p.values[0]) == pytest.approx(0.01, rel=1e-6)

    def test_adam_converges_on_shifted_quadratic(self):
        p = Tensor(np.array([0.0]), requires_grad=True, dtype="float64")
        opt = Adam([p], lr=0.1)
        for _ in range(500):
            opt.zero_grad()
            ((p - 3.0).square()).sum().backward()
            opt.step()
        assert abs(p.values[0] - 3.0) < 1e-3
