"""Adam update rule against hand-evaluated values."""

import numpy as np
import pytest

from blid.errors import ConfigError, NonFiniteValue
from blid.nn import Adam, Parameter


def hand_adam_step(x, g, t, lr=0.001, b1=0.9, b2=0.999, eps=1e-8, m=0.0, v=0.0):
    """Textbook Adam recurrence evaluated in plain Python floats."""
    m = b1 * m + (1 - b1) * g
    v = b2 * v + (1 - b2) * g * g
    m_hat = m / (1 - b1 ** t)
    v_hat = v / (1 - b2 ** t)
    return x - lr * m_hat / (np.sqrt(v_hat) + eps), m, v


class TestAdam:
    def test_single_scalar_first_step_matches_hand_formula(self):
        p = Parameter(np.array([1.0]))
        opt = Adam([p], lr=0.001)
        p.grad = np.array([1.0])
        opt.step()
        # t=1: m_hat = g, v_hat = g^2, delta = -lr * 1/(1+eps) ~ -0.000999...
        expected, _, _ = hand_adam_step(1.0, 1.0, t=1)
        np.testing.assert_allclose(p.data, [expected], rtol=0, atol=1e-15)
        assert abs(float(p.data[0]) - (1.0 - 0.000999)) < 1e-5

    def test_three_steps_match_recurrence(self):
        p = Parameter(np.array([0.3]))
        opt = Adam([p], lr=0.01)
        x, m, v = 0.3, 0.0, 0.0
        for t in (1, 2, 3):
            g = 0.5 * t
            p.grad = np.array([g])
            opt.step()
            x, m, v = hand_adam_step(x, g, t, lr=0.01, m=m, v=v)
            np.testing.assert_allclose(p.data, [x], atol=1e-14)

    def test_zero_gradient_keeps_parameter_but_advances_time(self):
        p = Parameter(np.array([2.0]))
        opt = Adam([p])
        p.grad = np.zeros(1)
        opt.step()
        np.testing.assert_array_equal(p.data, [2.0])
        assert opt.t == 1
        # unset gradient counts as zero too
        opt.step()
        np.testing.assert_array_equal(p.data, [2.0])
        assert opt.t == 2

    def test_gradients_cleared_after_step(self):
        p = Parameter(np.array([1.0]))
        opt = Adam([p])
        p.grad = np.array([1.0])
        opt.step()
        assert p.grad is None

    def test_identical_params_get_identical_updates(self):
        a = Parameter(np.full(4, 0.7))
        b = Parameter(np.full(4, 0.7))
        opt = Adam([a, b])
        a.grad = np.full(4, -0.2)
        b.grad = np.full(4, -0.2)
        opt.step()
        np.testing.assert_array_equal(a.data, b.data)

    def test_nan_gradient_reports_parameter_name(self):
        p = Parameter(np.array([1.0]), name="head.w")
        opt = Adam([p])
        p.grad = np.array([np.nan])
        with pytest.raises(NonFiniteValue) as err:
            opt.step()
        assert "head.w" in str(err.value)

    def test_bad_hyperparameters_rejected(self):
        p = Parameter(np.array([1.0]))
        with pytest.raises(ConfigError):
            Adam([p], lr=0.0)
        with pytest.raises(ConfigError):
            Adam([p], beta1=1.0)

    def test_f32_parameters_stay_f32(self):
        p = Parameter(np.ones(3, dtype=np.float32))
        opt = Adam([p])
        p.grad = np.ones(3, dtype=np.float32)
        opt.step()
        assert p.data.dtype == np.float32
