"""Unit tests for the dense MLP: layout, init, forward pass and exact gradients."""

import math

import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, EmptySetError, LabelRangeError
from app.models.schema import Activation, MlpArchitecture
from app.nn.mlp import (
    apply_update,
    forward,
    init_params,
    init_range,
    loss_and_grad,
    param_count,
    per_sample_loss,
    predict_proba,
    unflatten,
)


@pytest.fixture
def arch() -> MlpArchitecture:
    return MlpArchitecture(layer_widths=[2, 16, 3])


@pytest.fixture
def batch() -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(7)
    return rng.normal(size=(8, 2)), rng.integers(0, 3, size=8)


def _numeric_grad(arch, params, batch, step=1e-6):
    grad = np.zeros_like(params)
    for i in range(params.size):
        plus = params.copy()
        minus = params.copy()
        plus[i] += step
        minus[i] -= step
        grad[i] = (loss_and_grad(arch, plus, batch)[0] - loss_and_grad(arch, minus, batch)[0]) / (
            2 * step
        )
    return grad


# ---------------------------------------------------------------------------
# Layout and initialisation
# ---------------------------------------------------------------------------


class TestLayout:
    def test_param_count(self, arch):
        assert param_count(arch) == 2 * 16 + 16 + 16 * 3 + 3

    def test_param_count_single_layer(self):
        assert param_count(MlpArchitecture(layer_widths=[4, 2])) == 10

    def test_unflatten_views_follow_layout(self, arch):
        params = np.arange(param_count(arch), dtype=np.float64)
        (w1, b1), (w2, b2) = unflatten(arch, params)
        assert w1.shape == (2, 16)
        assert b1.shape == (16,)
        assert w2.shape == (16, 3)
        assert b2.shape == (3,)
        assert w1[0, 0] == 0.0 and w1[1, 0] == 16.0
        assert b1[0] == 32.0
        assert w2[0, 0] == 48.0
        assert b2[-1] == params[-1]

    def test_unflatten_rejects_wrong_length(self, arch):
        with pytest.raises(DimensionMismatchError):
            unflatten(arch, np.zeros(5))


class TestInitParams:
    def test_deterministic(self, arch):
        assert np.array_equal(init_params(arch, 42), init_params(arch, 42))

    def test_different_seeds_differ(self, arch):
        assert not np.array_equal(init_params(arch, 1), init_params(arch, 2))

    def test_weights_within_range_biases_zero(self, arch):
        params = init_params(arch, 3)
        (w1, b1), (w2, b2) = unflatten(arch, params)
        assert np.all(np.abs(w1) <= init_range(2, 16))
        assert np.all(np.abs(w2) <= init_range(16, 3))
        assert not b1.any() and not b2.any()

    def test_init_range_formula(self):
        assert init_range(2, 16) == pytest.approx(math.sqrt(6.0 / 18.0))


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------


class TestForward:
    def test_zero_weights_give_zero_logits(self, arch, batch):
        logits = forward(arch, np.zeros(param_count(arch)), batch[0])
        assert logits.shape == (8, 3)
        assert not logits.any()

    def test_zero_weights_give_uniform_probabilities(self, arch, batch):
        proba = predict_proba(arch, np.zeros(param_count(arch)), batch[0])
        assert np.allclose(proba, 1.0 / 3.0)

    def test_zero_weights_loss_is_log_classes(self, arch, batch):
        losses = per_sample_loss(arch, np.zeros(param_count(arch)), *batch)
        assert np.allclose(losses, math.log(3))

    def test_single_row_input_is_accepted(self, arch):
        logits = forward(arch, init_params(arch, 0), np.array([0.5, -0.5]))
        assert logits.shape == (1, 3)

    def test_wrong_input_width(self, arch):
        with pytest.raises(DimensionMismatchError):
            forward(arch, init_params(arch, 0), np.zeros((4, 3)))

    def test_probabilities_sum_to_one(self, arch, batch):
        proba = predict_proba(arch, init_params(arch, 5), batch[0])
        assert np.allclose(proba.sum(axis=1), 1.0)

    def test_large_logits_stay_finite(self):
        arch = MlpArchitecture(layer_widths=[1, 2])
        params = np.array([1000.0, -1000.0, 0.0, 0.0])
        losses = per_sample_loss(arch, params, np.array([[1.0]]), np.array([1]))
        assert np.isfinite(losses).all()
        assert losses[0] == pytest.approx(2000.0)


# ---------------------------------------------------------------------------
# Loss and gradient
# ---------------------------------------------------------------------------


class TestLossAndGrad:
    @pytest.mark.parametrize("activation", [Activation.TANH, Activation.RELU])
    def test_matches_central_differences(self, batch, activation):
        arch = MlpArchitecture(layer_widths=[2, 16, 3], activation=activation)
        params = init_params(arch, 11)
        _, grad = loss_and_grad(arch, params, batch)
        numeric = _numeric_grad(arch, params, batch)
        rel = np.linalg.norm(grad - numeric) / (np.linalg.norm(grad) + np.linalg.norm(numeric))
        assert rel < 1e-5

    def test_loss_equals_mean_per_sample_loss(self, arch, batch):
        params = init_params(arch, 2)
        loss, _ = loss_and_grad(arch, params, batch)
        assert loss == pytest.approx(per_sample_loss(arch, params, *batch).mean(), rel=1e-12)

    def test_mean_of_per_sample_gradients(self, arch, batch):
        params = init_params(arch, 4)
        _, full = loss_and_grad(arch, params, batch)
        singles = [loss_and_grad(arch, params, (batch[0][i : i + 1], batch[1][i : i + 1]))[1] for i in range(8)]
        assert np.allclose(full, np.mean(singles, axis=0), atol=1e-12)

    def test_does_not_mutate_params(self, arch, batch):
        params = init_params(arch, 4)
        before = params.copy()
        loss_and_grad(arch, params, batch)
        assert np.array_equal(params, before)

    def test_empty_batch(self, arch):
        with pytest.raises(EmptySetError):
            loss_and_grad(arch, init_params(arch, 0), (np.zeros((0, 2)), np.zeros(0, dtype=np.int64)))

    def test_label_out_of_range(self, arch):
        with pytest.raises(LabelRangeError):
            loss_and_grad(arch, init_params(arch, 0), (np.zeros((1, 2)), np.array([3])))

    def test_wrong_param_length(self, arch, batch):
        with pytest.raises(DimensionMismatchError):
            loss_and_grad(arch, np.zeros(3), batch)


class TestApplyUpdate:
    def test_sgd_step(self):
        out = apply_update(np.array([1.0, 2.0]), np.array([0.5, -1.0]), 0.1)
        assert np.allclose(out, [0.95, 2.1])

    def test_returns_new_vector(self):
        params = np.array([1.0, 2.0])
        apply_update(params, np.ones(2), 0.5)
        assert np.array_equal(params, [1.0, 2.0])

    @pytest.mark.parametrize("eta", [0.0, -0.1])
    def test_rejects_non_positive_eta(self, eta):
        with pytest.raises(ValueError):
            apply_update(np.zeros(2), np.zeros(2), eta)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply_update(np.zeros(2), np.zeros(3), 0.1)
