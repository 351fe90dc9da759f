"""Parity between the compiled kernels and the pure-Python fallback."""

import numpy as np
import pytest

from airfoilgen import kernels
from airfoilgen.kernels import _pyops

compiled = pytest.importorskip(
    "airfoilgen.kernels._ops", reason="compiled extension not built"
)

ALL_ACTS = [
    kernels.ACT_IDENTITY,
    kernels.ACT_LEAKY_RELU,
    kernels.ACT_TANH,
    kernels.ACT_SIGMOID,
]


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


def test_constants_agree():
    assert compiled.ACT_IDENTITY == _pyops.ACT_IDENTITY
    assert compiled.ACT_LEAKY_RELU == _pyops.ACT_LEAKY_RELU
    assert compiled.ACT_TANH == _pyops.ACT_TANH
    assert compiled.ACT_SIGMOID == _pyops.ACT_SIGMOID
    assert compiled.LEAKY_SLOPE == _pyops.LEAKY_SLOPE


@pytest.mark.parametrize("act", ALL_ACTS)
def test_act_forward_parity(act):
    rng = np.random.default_rng(0)
    z = rng.standard_normal((7, 11)) * 3
    np.testing.assert_allclose(
        compiled.act_forward(z, act), _pyops.act_forward(z, act), atol=1e-15
    )


@pytest.mark.parametrize("act", ALL_ACTS)
def test_act_backward_parity(act):
    rng = np.random.default_rng(1)
    z = rng.standard_normal((5, 9)) * 2
    g = rng.standard_normal((5, 9))
    np.testing.assert_allclose(
        compiled.act_backward(z, g, act), _pyops.act_backward(z, g, act), atol=1e-15
    )


def test_dense_forward_parity():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((16, 200))
    w = rng.standard_normal((256, 200))
    b = rng.standard_normal(256)
    np.testing.assert_allclose(
        compiled.dense_forward(x, w, b), _pyops.dense_forward(x, w, b),
        rtol=1e-13, atol=1e-13,
    )


def test_dense_backward_parity():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((16, 128))
    w = rng.standard_normal((64, 128))
    gz = rng.standard_normal((16, 64))
    for a, b in zip(compiled.dense_backward(x, w, gz), _pyops.dense_backward(x, w, gz)):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


def test_adam_update_parity():
    rng = np.random.default_rng(4)
    p1 = rng.standard_normal((8, 5))
    g = rng.standard_normal((8, 5))
    p2 = p1.copy()
    m1, v1 = np.zeros_like(p1), np.zeros_like(p1)
    m2, v2 = np.zeros_like(p2), np.zeros_like(p2)
    for t in range(1, 4):
        compiled.adam_update(p1, g, m1, v1, t, 1e-3, 0.9, 0.999, 1e-8)
        _pyops.adam_update(p2, g, m2, v2, t, 1e-3, 0.9, 0.999, 1e-8)
    np.testing.assert_allclose(p1, p2, atol=1e-15)
    np.testing.assert_allclose(m1, m2, atol=1e-15)
    np.testing.assert_allclose(v1, v2, atol=1e-15)


def test_dense_forward_oracle():
    # tiny hand-computed case guards both implementations at once
    x = np.array([[1.0, 2.0]])
    w = np.array([[3.0, -1.0], [0.5, 0.5]])
    b = np.array([1.0, -1.0])
    expected = np.array([[2.0, 0.5]])
    np.testing.assert_allclose(compiled.dense_forward(x, w, b), expected)
    np.testing.assert_allclose(_pyops.dense_forward(x, w, b), expected)
