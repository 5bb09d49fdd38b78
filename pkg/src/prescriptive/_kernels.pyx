# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: one fused pass per call instead of numpy temporaries."""
import numpy as np

from libc.math cimport exp, log1p


def logistic_loss_grad(const double[:, ::1] X, const double[::1] y,
                       const double[::1] sample_weights, const double[::1] weights,
                       double bias, double l2):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double z, p, e, r, wi, yi
    cdef double loss = 0.0
    cdef double wsum = 0.0
    cdef double reg = 0.0

    grad_arr = np.zeros(d + 1)
    cdef double[::1] grad = grad_arr

    for i in range(n):
        wi = sample_weights[i]
        wsum += wi
        if wi == 0.0:
            continue
        yi = y[i]
        z = bias
        for j in range(d):
            z += X[i, j] * weights[j]
        if z >= 0.0:
            e = exp(-z)
            loss += wi * (z + log1p(e) - yi * z)
            p = 1.0 / (1.0 + e)
        else:
            e = exp(z)
            loss += wi * (log1p(e) - yi * z)
            p = e / (1.0 + e)
        r = wi * (p - yi)
        for j in range(d):
            grad[j] += r * X[i, j]
        grad[d] += r

    for j in range(d):
        grad[j] = grad[j] / wsum + l2 * weights[j]
        reg += weights[j] * weights[j]
    grad[d] = grad[d] / wsum
    return loss / wsum + 0.5 * l2 * reg, grad_arr


def arm_cumsums(treatment, outcome):
    cdef const long long[::1] t = np.ascontiguousarray(treatment, dtype=np.int64)
    cdef const long long[::1] y = np.ascontiguousarray(outcome, dtype=np.int64)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t i

    out_arr = np.zeros((4, n + 1), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr

    for i in range(n):
        out[0, i + 1] = out[0, i] + t[i]
        out[1, i + 1] = out[1, i] + t[i] * y[i]
        out[2, i + 1] = out[2, i] + (1 - t[i])
        out[3, i + 1] = out[3, i] + (1 - t[i]) * y[i]
    return out_arr[0], out_arr[1], out_arr[2], out_arr[3]
