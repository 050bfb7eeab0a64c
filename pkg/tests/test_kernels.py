"""Compiled and fallback kernels against a direct transcription of the recursion."""

import os
import subprocess
import sys

import numpy as np
import pytest

from allpass import _kernels_py, kernels

try:
    from allpass import _kernels as _compiled
except ImportError:  # pragma: no cover - extension not built
    _compiled = None

BACKENDS = [_kernels_py] + ([_compiled] if _compiled is not None else [])


def naive_residuals(phi, x):
    # 1-based transcription: z_{t-p} = sum_k phi_k z_{t-p+k} - (x_t - sum_k phi_k x_{t-k})
    p, n = len(phi), len(x)
    X = {t: x[t - 1] for t in range(1, n + 1)}
    z = {}
    for t in range(n + p, n, -1):
        z[t - p] = 0.0
    for t in range(n, p, -1):
        innov = X[t] - sum(phi[k - 1] * X[t - k] for k in range(1, p + 1))
        z[t - p] = sum(phi[k - 1] * z[t - p + k] for k in range(1, p + 1)) - innov
    return np.array([z[t] for t in range(1, n - p + 1)])


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__)
@pytest.mark.parametrize("p", [1, 2, 4])
def test_residuals_match_naive(backend, p, rng):
    from tests.conftest import random_causal

    phi = random_causal(rng, p)
    x = rng.standard_normal(60)
    np.testing.assert_allclose(backend.allpass_residuals(phi, x), naive_residuals(phi, x),
                               rtol=0, atol=1e-12)


@pytest.mark.skipif(_compiled is None, reason="extension not built")
def test_backends_agree(rng):
    from tests.conftest import random_causal

    for p in (1, 3, 5):
        phi = random_causal(rng, p)
        x = rng.standard_normal(400)
        z_c = _compiled.allpass_residuals(phi, x)
        np.testing.assert_allclose(z_c, _kernels_py.allpass_residuals(phi, x), atol=1e-11)
        np.testing.assert_allclose(_compiled.allpass_gradient(phi, x, z_c),
                                   _kernels_py.allpass_gradient(phi, x, z_c), atol=1e-10)
        phis = np.array([random_causal(rng, p) for _ in range(5)])
        np.testing.assert_allclose(_compiled.batch_residuals(phis, x),
                                   _kernels_py.batch_residuals(phis, x), atol=1e-11)


def test_backend_selected_at_import():
    forced = os.environ.get("ALLPASS_PURE_PYTHON", "") not in ("", "0")
    expected = "cython" if _compiled is not None and not forced else "python"
    assert kernels.BACKEND == expected


def test_env_var_forces_python_backend():
    code = "import allpass.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"ALLPASS_PURE_PYTHON": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"
