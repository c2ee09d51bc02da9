import numpy as np
import pytest

from core.nn import (
    AdamOptimizer,
    LinearLayer,
    adam_step,
    grad_check,
    linear_backward,
    linear_forward,
    relu_backward,
    relu_forward,
    tanh_backward,
)
from utils.exceptions import ShapeMismatchError


def test_linear_forward_examples():
    x = np.array([[1.0, 1.0]])
    layer = LinearLayer(np.eye(2), np.array([1.0, -1.0]))
    assert np.array_equal(linear_forward(layer, x), [[2.0, 0.0]])
    assert np.array_equal(linear_forward(LinearLayer(np.eye(2), np.zeros(2)), x), x)
    shifted = linear_forward(LinearLayer(np.ones((2, 3)), np.array([1.0, 2.0, 3.0])), np.zeros((4, 2)))
    assert np.array_equal(shifted, np.tile([1.0, 2.0, 3.0], (4, 1)))


def test_linear_forward_shape_error():
    with pytest.raises(ShapeMismatchError):
        linear_forward(LinearLayer(np.eye(2), np.zeros(2)), np.ones((1, 3)))


def test_bias_shape_must_match_weight():
    with pytest.raises(ShapeMismatchError):
        LinearLayer(np.ones((2, 3)), np.zeros(2))


def test_relu_examples():
    x = np.array([[-1.0, 2.0]])
    assert np.array_equal(relu_forward(x), [[0.0, 2.0]])
    assert np.array_equal(relu_backward(x, np.array([[5.0, 5.0]])), [[0.0, 5.0]])
    positive = np.array([[0.5, 3.0]])
    assert np.array_equal(relu_forward(positive), positive)


def test_tanh_backward_matches_derivative():
    x = np.array([[0.3, -1.2]])
    h = 1e-6
    numeric = (np.tanh(x + h) - np.tanh(x - h)) / (2 * h)
    assert np.allclose(tanh_backward(x, np.ones_like(x)), numeric, atol=1e-9)


def test_linear_backward_zero_upstream():
    layer = LinearLayer(np.ones((3, 2)), np.zeros(2))
    out = linear_backward(layer, np.ones((4, 3)), np.zeros((4, 2)))
    assert not out.any()
    assert not layer.grad_weight.any() and not layer.grad_bias.any()


def test_linear_backward_scalar_chain():
    layer = LinearLayer(np.array([[3.0]]), np.array([0.5]))
    dx = linear_backward(layer, np.array([[2.0]]), np.array([[4.0]]))
    assert layer.grad_weight[0, 0] == 8.0
    assert layer.grad_bias[0] == 4.0
    assert dx[0, 0] == 12.0


def test_linear_backward_matches_finite_differences(rng):
    layer = LinearLayer.glorot(4, 3, rng)
    x = rng.standard_normal((5, 4))
    upstream = rng.standard_normal((5, 3))

    def closure():
        layer.zero_grad()
        out = linear_forward(layer, x)
        linear_backward(layer, x, upstream)
        return float(np.sum(out * upstream)), layer.gradients()

    report = grad_check(closure, layer.parameters(), tolerance=1e-5, max_coords=15, rng=rng)
    assert report.passed, report.offending


def test_zero_grad_then_backward_matches_fresh_layer(rng):
    weight = rng.standard_normal((3, 2))
    x = rng.standard_normal((4, 3))
    upstream = rng.standard_normal((4, 2))
    used = LinearLayer(weight.copy(), np.zeros(2))
    linear_backward(used, x, upstream)
    used.zero_grad()
    assert not used.grad_weight.any()
    linear_backward(used, x, upstream)
    fresh = LinearLayer(weight.copy(), np.zeros(2))
    linear_backward(fresh, x, upstream)
    assert np.array_equal(used.grad_weight, fresh.grad_weight)
    assert np.array_equal(used.grad_bias, fresh.grad_bias)


def test_glorot_limits(rng):
    layer = LinearLayer.glorot(10, 6, rng)
    limit = np.sqrt(6.0 / 16.0)
    assert np.all(np.abs(layer.weight) <= limit)
    assert not layer.bias.any()


def test_adam_single_scalar_step():
    param = np.array([1.0])
    optimizer = AdamOptimizer(lr=0.1)
    adam_step(optimizer, [param], [np.array([1.0])])
    assert abs((param[0] - 1.0) + 0.1) < 1e-6
    assert optimizer.step_count == 1


def test_adam_zero_gradients_and_zero_lr_leave_params_unchanged(rng):
    param = rng.standard_normal((3, 2))
    before = param.copy()
    AdamOptimizer().step([param], [np.zeros_like(param)])
    assert np.array_equal(param, before)
    AdamOptimizer(lr=0.0).step([param], [rng.standard_normal((3, 2))])
    assert np.array_equal(param, before)


def test_adam_is_deterministic(rng):
    grads = [rng.standard_normal(4)]
    a, b = np.ones(4), np.ones(4)
    first, second = AdamOptimizer(), AdamOptimizer()
    for _ in range(3):
        first.step([a], grads)
        second.step([b], grads)
    assert np.array_equal(a, b)
    assert np.all(first.second_moment[0] >= 0)
    assert first.step_count == 3


def test_grad_check_quadratic(rng):
    p = rng.standard_normal(6)
    report = grad_check(lambda: (0.5 * float(p @ p), [p.copy()]), [p], rng=rng)
    assert report.passed
    assert report.max_rel_error < 1e-8


def test_grad_check_constant_loss():
    p = np.ones(3)
    report = grad_check(lambda: (4.0, [np.zeros(3)]), [p])
    assert report.passed
    assert report.max_rel_error == 0.0


def test_grad_check_detects_wrong_gradient(rng):
    p = rng.standard_normal(5) + 2.0
    report = grad_check(lambda: (0.5 * float(p @ p), [-p.copy()]), [p], rng=rng)
    assert not report.passed
    assert report.offending


def test_grad_check_restores_parameters(rng):
    p = rng.standard_normal(4)
    before = p.copy()
    grad_check(lambda: (float(np.sum(np.sin(p))), [np.cos(p)]), [p], rng=rng)
    assert np.array_equal(p, before)
