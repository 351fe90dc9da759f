"""Pure NumPy implementations of the training hot loops.

Mirrors the compiled extension in `_ops`; one of the two is selected at
import time by `airfoilgen.kernels`.
"""

import numpy as np

ACT_IDENTITY = 0
ACT_LEAKY_RELU = 1
ACT_TANH = 2
ACT_SIGMOID = 3

LEAKY_SLOPE = 0.01


def act_forward(z, act):
    if act == ACT_IDENTITY:
        return z.copy()
    if act == ACT_LEAKY_RELU:
        return np.where(z >= 0.0, z, LEAKY_SLOPE * z)
    if act == ACT_TANH:
        return np.tanh(z)
    if act == ACT_SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    raise ValueError(f"unknown activation id {act}")


def act_backward(z, grad_out, act):
    if act == ACT_IDENTITY:
        return grad_out.copy()
    if act == ACT_LEAKY_RELU:
        return np.where(z >= 0.0, grad_out, LEAKY_SLOPE * grad_out)
    if act == ACT_TANH:
        t = np.tanh(z)
        return grad_out * (1.0 - t * t)
    if act == ACT_SIGMOID:
        s = 1.0 / (1.0 + np.exp(-z))
        return grad_out * s * (1.0 - s)
    raise ValueError(f"unknown activation id {act}")


def dense_forward(x, weights, bias):
    """z = x @ W.T + b for a batch of row vectors."""
    return x @ weights.T + bias


def dense_backward(x, weights, grad_z):
    """Gradients of z = x @ W.T + b: returns (dW, db, dx)."""
    grad_w = grad_z.T @ x
    grad_b = grad_z.sum(axis=0)
    grad_x = grad_z @ weights
    return grad_w, grad_b, grad_x


def adam_update(param, grad, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam step, in place on param/m/v. t is 1-based."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)
