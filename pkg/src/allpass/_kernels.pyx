"""Compiled kernels for the all-pass residual recursion and rank dispersion."""

import numpy as np


cdef void _residuals_into(const double[::1] phi, const double[::1] x,
                          double* z, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t p = phi.shape[0]
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(m - 1, -1, -1):
        acc = -x[i + p]
        for k in range(1, p + 1):
            acc += phi[k - 1] * x[i + p - k]
            if i + k < m:
                acc += phi[k - 1] * z[i + k]
        z[i] = acc


def allpass_residuals(const double[::1] phi, const double[::1] x):
    cdef Py_ssize_t m = x.shape[0] - phi.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] z = out
    if m > 0:
        with nogil:
            _residuals_into(phi, x, &z[0], m)
    return out


def allpass_gradient(const double[::1] phi, const double[::1] x,
                     const double[::1] z):
    cdef Py_ssize_t p = phi.shape[0]
    cdef Py_ssize_t m = z.shape[0]
    out = np.zeros((m, p), dtype=np.float64)
    cdef double[:, ::1] g = out
    cdef Py_ssize_t i, j, k
    cdef double acc
    with nogil:
        for j in range(1, p + 1):
            for i in range(m - 1, -1, -1):
                acc = x[i + p - j]
                if i + j < m:
                    acc += z[i + j]
                for k in range(1, p + 1):
                    if i + k < m:
                        acc += phi[k - 1] * g[i + k, j - 1]
                g[i, j - 1] = acc
    return out


def batch_residuals(const double[:, ::1] phis, const double[::1] x):
    """Residual series at every row of `phis`, stacked into a (k, n - p) array."""
    cdef Py_ssize_t npts = phis.shape[0]
    cdef Py_ssize_t m = x.shape[0] - phis.shape[1]
    out = np.empty((npts, max(m, 0)), dtype=np.float64)
    cdef double[:, ::1] z = out
    cdef Py_ssize_t a
    if m > 0:
        with nogil:
            for a in range(npts):
                _residuals_into(phis[a], x, &z[a, 0], m)
    return out
