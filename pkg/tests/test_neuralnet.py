import numpy as np
import pytest

from airfoilgen import kernels
from airfoilgen import neuralnet as nn
from airfoilgen.errors import ShapeMismatch, StaleCache


def _tiny_net(seed=0):
    rng = np.random.default_rng(seed)
    return nn.glorot_init([4, 5, 3], ["leaky_relu", "tanh"], rng)


class TestForward:
    def test_identity_single_layer(self):
        net = nn.Mlp([nn.DenseLayer(np.eye(3), np.array([1.0, -1.0, 0.0]))])
        out, _ = nn.forward(net, np.array([[2.0, 3.0, 4.0]]))
        np.testing.assert_allclose(out, [[3.0, 2.0, 4.0]])

    def test_known_affine(self):
        w = np.array([[1.0, 2.0], [0.0, -1.0]])
        net = nn.Mlp([nn.DenseLayer(w, np.array([0.5, 0.0]), "tanh")])
        out, _ = nn.forward(net, np.array([[1.0, 1.0]]))
        np.testing.assert_allclose(out, np.tanh([[3.5, -1.0]]))

    def test_input_width_check(self):
        with pytest.raises(ShapeMismatch):
            nn.forward(_tiny_net(), np.zeros((2, 7)))

    def test_layer_width_check(self):
        w1 = np.zeros((5, 4))
        w2 = np.zeros((3, 6))  # expects width 6, got 5
        with pytest.raises(ShapeMismatch):
            nn.Mlp([nn.DenseLayer(w1, np.zeros(5)), nn.DenseLayer(w2, np.zeros(3))])


class TestGlorot:
    def test_limits_and_bias(self):
        rng = np.random.default_rng(1)
        net = nn.glorot_init([10, 20], ["identity"], rng)
        limit = np.sqrt(6.0 / 30.0)
        assert np.all(np.abs(net.layers[0].weights) <= limit)
        np.testing.assert_array_equal(net.layers[0].bias, 0.0)

    def test_deterministic(self):
        a = nn.glorot_init([4, 3], ["tanh"], np.random.default_rng(9))
        b = nn.glorot_init([4, 3], ["tanh"], np.random.default_rng(9))
        np.testing.assert_array_equal(a.layers[0].weights, b.layers[0].weights)


def _fd_check(net, x, upstream_fn, analytic, h=1e-6):
    """Central-difference check of every parameter gradient."""
    params = net.parameters()
    for p, g in zip(params, analytic):
        rng = np.random.default_rng(0)
        # probe a handful of random entries per array
        idxs = [tuple(rng.integers(0, s) for s in p.shape) for _ in range(4)]
        for idx in idxs:
            orig = p[idx]
            p[idx] = orig + h
            up = upstream_fn()
            p[idx] = orig - h
            down = upstream_fn()
            p[idx] = orig
            fd = (up - down) / (2 * h)
            assert g[idx] == pytest.approx(fd, rel=1e-4, abs=1e-8)


class TestBackward:
    @pytest.mark.parametrize(
        "widths,acts",
        [
            ([4, 5, 3], ["leaky_relu", "tanh"]),
            ([3, 6, 1], ["leaky_relu", "sigmoid"]),
            ([2, 4, 4, 2], ["leaky_relu", "leaky_relu", "identity"]),
        ],
    )
    def test_matches_finite_difference(self, widths, acts):
        rng = np.random.default_rng(3)
        net = nn.glorot_init(widths, acts, rng)
        x = rng.standard_normal((5, widths[0]))
        target = rng.standard_normal((5, widths[-1]))

        def loss():
            out, _ = nn.forward(net, x)
            return float(np.sum((out - target) ** 2))

        out, cache = nn.forward(net, x)
        grads, _ = nn.backward(net, cache, 2.0 * (out - target))
        _fd_check(net, x, loss, nn.flat_grads(grads))

    def test_input_gradient(self):
        rng = np.random.default_rng(4)
        net = _tiny_net(4)
        x = rng.standard_normal((2, 4))
        out, cache = nn.forward(net, x)
        _, gx = nn.backward(net, cache, np.ones_like(out))
        h = 1e-6
        for i in range(2):
            for j in range(4):
                xp = x.copy()
                xp[i, j] += h
                up = float(np.sum(nn.forward(net, xp)[0]))
                xp[i, j] -= 2 * h
                down = float(np.sum(nn.forward(net, xp)[0]))
                assert gx[i, j] == pytest.approx((up - down) / (2 * h), rel=1e-4,
                                                 abs=1e-8)

    def test_partial_stops_at_layer(self):
        net = _tiny_net(5)
        x = np.random.default_rng(5).standard_normal((3, 4))
        _, cache = nn.forward(net, x)
        upstream = np.ones_like(cache.pre_acts[0])
        grads, _ = nn.backward_partial(net, cache, upstream, 0)
        assert len(grads) == 1

    def test_stale_cache(self):
        net_a, net_b = _tiny_net(0), _tiny_net(1)
        out, cache = nn.forward(net_a, np.zeros((1, 4)))
        with pytest.raises(StaleCache):
            nn.backward(net_b, cache, np.ones_like(out))


class TestAdam:
    def test_first_step_closed_form(self):
        # with zero state, one step moves by lr * g / (|g| + eps)
        p = np.array([1.0, -2.0])
        g = np.array([0.5, -3.0])
        state = nn.AdamState.for_params([p], lr=0.01)
        nn.adam_step(state, [p], [g])
        expected = np.array([1.0, -2.0]) - 0.01 * np.sign(g) * np.abs(g) / (
            np.abs(g) + 1e-8
        )
        np.testing.assert_allclose(p, expected, atol=1e-12)

    def test_two_steps_reference(self):
        # reference implementation cross-check over several steps
        rng = np.random.default_rng(7)
        p = rng.standard_normal(6)
        p_ref = p.copy()
        m = np.zeros(6)
        v = np.zeros(6)
        state = nn.AdamState.for_params([p], lr=0.1)
        for t in range(1, 5):
            g = rng.standard_normal(6)
            nn.adam_step(state, [p], [g])
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            mh = m / (1 - 0.9**t)
            vh = v / (1 - 0.999**t)
            p_ref -= 0.1 * mh / (np.sqrt(vh) + 1e-8)
            np.testing.assert_allclose(p, p_ref, atol=1e-12)

    def test_minimizes_quadratic(self):
        p = np.array([5.0])
        state = nn.AdamState.for_params([p], lr=0.1)
        for _ in range(500):
            nn.adam_step(state, [p], [2.0 * p])
        assert abs(p[0]) < 1e-3

    def test_length_mismatch(self):
        p = np.zeros(3)
        state = nn.AdamState.for_params([p], lr=0.1)
        with pytest.raises(ShapeMismatch):
            nn.adam_step(state, [p], [np.zeros(3), np.zeros(2)])


class TestActivations:
    def test_leaky_relu_values(self):
        z = np.array([[-2.0, 0.0, 3.0]])
        out = kernels.act_forward(z, kernels.ACT_LEAKY_RELU)
        np.testing.assert_allclose(out, [[-0.02, 0.0, 3.0]])

    def test_sigmoid_range(self):
        z = np.linspace(-30, 30, 101)[None, :]
        out = kernels.act_forward(z, kernels.ACT_SIGMOID)
        assert np.all(out > 0) and np.all(out < 1)
        assert out[0, 50] == pytest.approx(0.5)
