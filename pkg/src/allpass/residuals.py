"""All-pass residual recursion, causality checks and the PACF parameterization.

For a causal AR polynomial ``phi(z) = 1 - phi_1 z - ... - phi_p z^p`` and a
series ``x_1..x_n`` the residuals are defined backwards from the end of the
sample, starting from zeros::

    z_{t-p} = phi_1 z_{t-p+1} + ... + phi_p z_t - phi(B) x_t,   t = n, ..., p+1

giving ``z_1..z_{n-p}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from allpass import kernels
from allpass.errors import CausalityError, DomainError

ROOT_MARGIN = 1e-9


def _as_phi(phi) -> np.ndarray:
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=np.float64)))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("phi must be a non-empty 1-d coefficient vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError("phi contains non-finite values")
    return arr


def ar_roots(phi) -> np.ndarray:
    """Roots of ``1 - phi_1 z - ... - phi_p z^p`` (companion-matrix eigenvalues)."""
    phi = _as_phi(phi)
    coeffs = np.concatenate((-phi[::-1], [1.0]))
    return np.roots(coeffs)


def is_causal(phi) -> bool:
    """True iff every root of the AR polynomial has modulus above ``1 + 1e-9``.

    Negligible trailing coefficients are dropped first: they only add roots of
    enormous modulus, and left in place they overflow the companion matrix.
    """
    phi = _as_phi(phi)
    keep = np.flatnonzero(np.abs(phi) > 1e-14 * max(1.0, float(np.abs(phi).max())))
    if keep.size == 0:
        return True
    roots = ar_roots(phi[: keep[-1] + 1])
    return bool(np.all(np.abs(roots) > 1.0 + ROOT_MARGIN))


@dataclass(frozen=True)
class AllPassParams:
    """Causal AR coefficient vector ``(phi_1, ..., phi_p)``."""

    phi: np.ndarray

    def __post_init__(self):
        arr = _as_phi(self.phi)
        if not is_causal(arr):
            raise CausalityError(f"phi={arr.tolist()} is not causal")
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    @property
    def p(self) -> int:
        return int(self.phi.size)

    @property
    def r(self) -> int:
        """Index of the last nonzero coefficient (the true all-pass order)."""
        nz = np.flatnonzero(self.phi)
        return int(nz[-1] + 1) if nz.size else 0

    def __array__(self, dtype=None, copy=None):
        return self.phi if dtype is None else self.phi.astype(dtype)

    def __len__(self):
        return self.p


def _check(phi, x):
    phi = _as_phi(phi)
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if x.ndim != 1:
        raise DomainError("x must be one-dimensional")
    if x.size <= phi.size:
        raise DomainError(f"series length {x.size} must exceed the order {phi.size}")
    if not is_causal(phi):
        raise CausalityError(f"phi={phi.tolist()} is not causal")
    return phi, x


def residuals(phi, x) -> np.ndarray:
    """Residuals ``z_1(phi), ..., z_{n-p}(phi)`` of the backward recursion."""
    phi, x = _check(phi, x)
    return kernels.allpass_residuals(phi, x)


def residual_gradient(phi, x) -> np.ndarray:
    """Jacobian ``dz_t/dphi_j`` of the finite-sample residuals, shape ``(n-p, p)``.

    Column ``j`` is the backward filter ``1/phi(B^{-1})`` applied to
    ``x_{t+p-j} + z_{t+j}(phi)``, with the same zero start as the residuals;
    this is the exact derivative of the recursion.
    """
    phi, x = _check(phi, x)
    z = kernels.allpass_residuals(phi, x)
    return kernels.allpass_gradient(phi, x, z)


def pacf_to_phi(kappa) -> np.ndarray:
    """Map partial autocorrelations in (-1, 1)^p to causal AR coefficients.

    Durbin-Levinson step-up: ``phi_{k,k} = kappa_k`` and
    ``phi_{k,j} = phi_{k-1,j} - kappa_k phi_{k-1,k-j}``.
    """
    kappa = _as_phi(kappa)
    if np.any(np.abs(kappa) >= 1.0):
        raise DomainError("partial autocorrelations must lie strictly inside (-1, 1)")
    phi = np.empty(0)
    for k in kappa:
        phi = np.concatenate((phi - k * phi[::-1], [k]))
    return phi


def phi_to_pacf(phi) -> np.ndarray:
    """Inverse of :func:`pacf_to_phi` (Durbin-Levinson step-down)."""
    phi = _as_phi(phi).copy()
    kappa = np.empty_like(phi)
    for k in range(phi.size - 1, -1, -1):
        kk = phi[k]
        if abs(kk) >= 1.0:
            raise CausalityError("coefficients are not causal")
        kappa[k] = kk
        head = phi[:k]
        phi = (head + kk * head[::-1]) / (1.0 - kk * kk)
    return kappa
