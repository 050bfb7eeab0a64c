"""Pure-Python (numpy/scipy) versions of the compiled kernels.

Same signatures and results as ``allpass._kernels``; used when the extension
is not built or when ``ALLPASS_PURE_PYTHON`` is set.
"""

import numpy as np
from scipy.signal import lfilter


def _backward_ar(phi, drive):
    # y_i = sum_k phi_k y_{i+k} + drive_i, zero beyond the end
    ar = np.concatenate(([1.0], -np.asarray(phi)))
    return np.ascontiguousarray(lfilter([1.0], ar, drive[::-1])[::-1])


def allpass_residuals(phi, x):
    phi = np.asarray(phi, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    p = phi.shape[0]
    innov = lfilter(np.concatenate(([1.0], -phi)), [1.0], x)[p:]
    return _backward_ar(phi, -innov)


def allpass_gradient(phi, x, z):
    phi = np.asarray(phi, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    p = phi.shape[0]
    m = z.shape[0]
    out = np.zeros((m, p))
    for j in range(1, p + 1):
        drive = x[p - j:p - j + m].copy()
        drive[: m - j] += z[j:]
        out[:, j - 1] = _backward_ar(phi, drive)
    return out


def batch_residuals(phis, x):
    phis = np.asarray(phis, dtype=np.float64)
    m = max(len(x) - phis.shape[1], 0)
    out = np.empty((phis.shape[0], m))
    for a, row in enumerate(phis):
        out[a] = allpass_residuals(row, x)
    return out
