"""Backend selection for the hot kernels.

The compiled extension is preferred; the numpy/scipy fallback is used when it
is missing or when the ``ALLPASS_PURE_PYTHON`` environment variable is set to
a non-empty value other than ``0``.
"""

import os

from allpass import _kernels_py

_force_python = os.environ.get("ALLPASS_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from allpass import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

allpass_residuals = _impl.allpass_residuals
allpass_gradient = _impl.allpass_gradient
batch_residuals = _impl.batch_residuals

__all__ = ["BACKEND", "allpass_residuals", "allpass_gradient", "batch_residuals"]
