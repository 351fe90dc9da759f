# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training kernels: fused dense layers, activations, Adam.

Matrix products go through BLAS directly; elementwise work runs in tight C
loops without NumPy temporaries. Semantics mirror `_pyops` exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt, tanh
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

ACT_IDENTITY = 0
ACT_LEAKY_RELU = 1
ACT_TANH = 2
ACT_SIGMOID = 3

LEAKY_SLOPE = 0.01

cdef double _SLOPE = 0.01


def act_forward(cnp.ndarray z_in, int act):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.ascontiguousarray(
        np.atleast_2d(z_in), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty_like(z)
    cdef Py_ssize_t i, j, rows = z.shape[0], cols = z.shape[1]
    cdef double v
    for i in range(rows):
        for j in range(cols):
            v = z[i, j]
            if act == 0:
                out[i, j] = v
            elif act == 1:
                out[i, j] = v if v >= 0.0 else _SLOPE * v
            elif act == 2:
                out[i, j] = tanh(v)
            else:
                out[i, j] = 1.0 / (1.0 + exp(-v))
    if z_in.ndim == 1:
        return np.asarray(out)[0]
    return np.asarray(out)


def act_backward(cnp.ndarray z_in, cnp.ndarray grad_in, int act):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.ascontiguousarray(
        np.atleast_2d(z_in), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] g = np.ascontiguousarray(
        np.atleast_2d(grad_in), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty_like(z)
    cdef Py_ssize_t i, j, rows = z.shape[0], cols = z.shape[1]
    cdef double v, t, s
    for i in range(rows):
        for j in range(cols):
            v = z[i, j]
            if act == 0:
                out[i, j] = g[i, j]
            elif act == 1:
                out[i, j] = g[i, j] if v >= 0.0 else _SLOPE * g[i, j]
            elif act == 2:
                t = tanh(v)
                out[i, j] = g[i, j] * (1.0 - t * t)
            else:
                s = 1.0 / (1.0 + exp(-v))
                out[i, j] = g[i, j] * s * (1.0 - s)
    if z_in.ndim == 1:
        return np.asarray(out)[0]
    return np.asarray(out)


def dense_forward(cnp.ndarray x_in, cnp.ndarray w_in, cnp.ndarray b_in):
    """z = x @ W.T + b for a batch of row vectors."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(
        x_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(
        w_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.ascontiguousarray(
        b_in, dtype=np.float64)
    cdef int batch = x.shape[0], n_in = x.shape[1], n_out = w.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.empty((batch, n_out))
    cdef double alpha = 1.0, beta = 0.0
    cdef char ta = b"T", tn = b"N"
    if batch > 0 and n_in > 0:
        # column-major view: Z^T (n_out x batch) = W'^T (n_out x n_in) @ X' (n_in x batch)
        dgemm(&ta, &tn, &n_out, &batch, &n_in, &alpha,
              &w[0, 0], &n_in, &x[0, 0], &n_in, &beta, &z[0, 0], &n_out)
    cdef Py_ssize_t i, j
    for i in range(batch):
        for j in range(n_out):
            z[i, j] += b[j]
    return np.asarray(z)


def dense_backward(cnp.ndarray x_in, cnp.ndarray w_in, cnp.ndarray gz_in):
    """Gradients of z = x @ W.T + b: returns (dW, db, dx)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(
        x_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(
        w_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gz = np.ascontiguousarray(
        gz_in, dtype=np.float64)
    cdef int batch = x.shape[0], n_in = x.shape[1], n_out = w.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gw = np.zeros((n_out, n_in))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gb = np.zeros(n_out)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gx = np.empty((batch, n_in))
    cdef double alpha = 1.0, beta = 0.0
    cdef char tn = b"N", tt = b"T"
    if batch > 0 and n_in > 0 and n_out > 0:
        # GW' (n_in x n_out) = X' (n_in x batch) @ GZ'^T (batch x n_out)
        dgemm(&tn, &tt, &n_in, &n_out, &batch, &alpha,
              &x[0, 0], &n_in, &gz[0, 0], &n_out, &beta, &gw[0, 0], &n_in)
        # GX' (n_in x batch) = W' (n_in x n_out) @ GZ' (n_out x batch)
        dgemm(&tn, &tn, &n_in, &batch, &n_out, &alpha,
              &w[0, 0], &n_in, &gz[0, 0], &n_out, &beta, &gx[0, 0], &n_in)
    cdef Py_ssize_t i, j
    for i in range(batch):
        for j in range(n_out):
            gb[j] += gz[i, j]
    return np.asarray(gw), np.asarray(gb), np.asarray(gx)


def adam_update(cnp.ndarray param, cnp.ndarray grad, cnp.ndarray m,
                cnp.ndarray v, long t, double lr, double beta1,
                double beta2, double eps):
    """One bias-corrected Adam step, in place on param/m/v. t is 1-based."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p1 = param.ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g1 = np.ascontiguousarray(
        grad, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] m1 = m.ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v1 = v.ravel()
    cdef Py_ssize_t i, n = p1.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double g, mh, vh
    for i in range(n):
        g = g1[i]
        m1[i] = beta1 * m1[i] + (1.0 - beta1) * g
        v1[i] = beta2 * v1[i] + (1.0 - beta2) * g * g
        mh = m1[i] / c1
        vh = v1[i] / c2
        p1[i] -= lr * mh / (sqrt(vh) + eps)
