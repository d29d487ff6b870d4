"""Adam: hand-computed single-step oracle, a two-step scalar trace, and the
clipping helper."""

import numpy as np
import pytest

from casetag.errors import InputError
from casetag.nn import Adam, Tensor, clip_global_norm


def adam_trace_ref(theta0, grads, lr=0.001, b1=0.9, b2=0.999, eps=1e-8):
    """Scalar reference: replays the update rule with plain floats."""
    theta, m, v = theta0, 0.0, 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        theta = theta - lr * m_hat / (v_hat ** 0.5 + eps)
        out.append(theta)
    return out


def test_zero_gradient_leaves_parameter_unchanged():
    p = Tensor(np.array([1.0, -2.0]), requires_grad=True)
    opt = Adam([p])
    p.grad = np.zeros_like(p.data)
    opt.step()
    assert np.all(p.data == [1.0, -2.0])
    assert np.all(opt.m[0] == 0.0) and np.all(opt.v[0] == 0.0)


def test_single_step_matches_bias_corrected_formula():
    p = Tensor(np.full(4, 10.0), requires_grad=True)
    opt = Adam([p], lr=0.001)
    p.grad = np.ones(4)
    opt.step()
    # m_hat = 1, v_hat = 1 after bias correction: update = -lr / (1 + eps)
    expected = 10.0 - 0.001 * 1.0 / (1.0 + 1e-8)
    assert np.allclose(p.data, expected, atol=0, rtol=0)
    assert p.grad is None  # grads cleared by the step


def test_two_steps_match_scalar_reference_trace():
    p = Tensor(np.array([0.5]), requires_grad=True)
    opt = Adam([p], lr=0.01)
    trace = []
    for g in (0.3, 0.3):
        p.grad = np.array([g])
        opt.step()
        trace.append(float(p.data[0]))
    want = adam_trace_ref(0.5, [0.3, 0.3], lr=0.01)
    assert np.allclose(trace, want, atol=1e-12, rtol=0)


def test_step_without_any_grads_raises():
    p = Tensor(np.ones(2), requires_grad=True)
    opt = Adam([p])
    with pytest.raises(InputError):
        opt.step()


def test_params_finite_after_steps():
    rng = np.random.default_rng(0)
    p = Tensor(rng.normal(size=8), requires_grad=True)
    opt = Adam([p], lr=0.05)
    for _ in range(50):
        p.grad = rng.normal(size=8) * 100
        opt.step()
    assert np.all(np.isfinite(p.data))


def test_clip_global_norm():
    a = Tensor(np.zeros(3), requires_grad=True)
    b = Tensor(np.zeros(4), requires_grad=True)
    a.grad = np.full(3, 3.0)
    b.grad = np.full(4, 4.0)
    norm = clip_global_norm([a, b], max_norm=5.0)
    assert norm == pytest.approx(np.sqrt(3 * 9 + 4 * 16))
    clipped = np.sqrt(np.sum(a.grad ** 2) + np.sum(b.grad ** 2))
    assert clipped == pytest.approx(5.0)
    # below the threshold nothing changes
    a.grad = np.array([0.1, 0.0, 0.0])
    b.grad = np.zeros(4)
    clip_global_norm([a, b], max_norm=5.0)
    assert a.grad[0] == pytest.approx(0.1)
