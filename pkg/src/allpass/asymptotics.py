"""Asymptotic covariance and efficiency of all-pass estimators.

The R, LAD and ML estimators all have limiting covariance
``c * sigma^2 * Gamma_p^{-1} / n`` where ``Gamma_p`` is the autocovariance
matrix of the AR process ``phi_0(B) Y_t = Z_t`` and ``c`` is an
estimator-specific scalar multiple. Relative efficiencies are ratios of
these multiples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from allpass.errors import AssumptionError, CausalityError, DomainError, QuadratureError
from allpass.residuals import _as_phi, is_causal
from allpass.scores import integrate_pieces, real_line_points, score_moments

PSI_TOL = 1e-16
PSI_CAP = 100_000


@dataclass(frozen=True)
class ArAutocovariance:
    gamma: np.ndarray  # gamma(0..p-1)
    matrix: np.ndarray  # p x p Toeplitz
    sigma2: float


@dataclass(frozen=True)
class EfficiencyReport:
    multiple_R: float
    multiple_LAD: float
    multiple_ML: float

    @property
    def are_R_LAD(self) -> float:
        return are(self.multiple_LAD, self.multiple_R)

    @property
    def are_R_ML(self) -> float:
        return are(self.multiple_ML, self.multiple_R)


def psi_weights(phi) -> np.ndarray:
    """Coefficients of ``1/phi(z)``, truncated once ``p`` consecutive terms fall below 1e-16."""
    phi = _as_phi(phi)
    if not is_causal(phi):
        raise CausalityError(f"phi={phi.tolist()} is not causal")
    p = phi.size
    psi = [1.0]
    small = 0
    for j in range(1, PSI_CAP):
        val = sum(phi[k] * psi[j - 1 - k] for k in range(min(p, j)))
        psi.append(val)
        small = small + 1 if abs(val) < PSI_TOL else 0
        if small >= p:
            break
    return np.asarray(psi)


def ar_autocovariance(phi, sigma2: float = 1.0, p: int | None = None) -> ArAutocovariance:
    """Autocovariances ``gamma(0..p-1)`` from psi weights, and their Toeplitz matrix."""
    phi = _as_phi(phi)
    if p is None:
        p = phi.size
    if p < 1:
        raise DomainError("p must be at least 1")
    psi = psi_weights(phi)
    gamma = np.array([sigma2 * (psi[: psi.size - h] @ psi[h:]) if h < psi.size else 0.0
                      for h in range(p)])
    return ArAutocovariance(gamma=gamma, matrix=toeplitz(gamma), sigma2=float(sigma2))


def scalar_multiple_R(w, noise, moments=None) -> float:
    """``(sigma^2 J - K^2) / (2 (sigma^2 L - K)^2)`` for weight ``w``."""
    m = moments if moments is not None else score_moments(w, noise)
    if not m.margin_positive:
        raise AssumptionError(
            f"the condition sigma^2 L > K fails for {w.name} weights with "
            f"{noise.name} noise: sigma^2 L - K = {m.score_margin:.3g}"
        )
    return m.cauchy_schwarz_gap / (2.0 * m.score_margin ** 2)


def _abs_moments(noise):
    pts = real_line_points(noise)
    mean_abs = integrate_pieces(lambda x: abs(x) * noise.pdf(x), pts)
    return mean_abs, noise.variance - mean_abs ** 2


def scalar_multiple_LAD(noise) -> float:
    """``Var|Z| / (2 (2 sigma^2 f(0) - E|Z|)^2)``."""
    mean_abs, var_abs = _abs_moments(noise)
    gap = 2.0 * noise.variance * float(noise.pdf(0.0)) - mean_abs
    if abs(gap) < 1e-12:
        raise AssumptionError("LAD multiple is singular: 2 sigma^2 f(0) = E|Z|")
    return var_abs / (2.0 * gap ** 2)


def fisher_location_information(noise) -> float:
    """``int f'(x)^2 / f(x) dx``."""
    pts = real_line_points(noise)
    return integrate_pieces(lambda x: float(noise.score(x)) ** 2 * noise.pdf(x), pts)


def scalar_multiple_ML(noise) -> float:
    """``(1/2) (sigma^2 I - 1)^{-1}`` with ``I`` the Fisher information for location."""
    excess = noise.variance * fisher_location_information(noise) - 1.0
    if excess <= 1e-10:
        raise AssumptionError(
            f"ML multiple is singular for {noise.name} noise (sigma^2 I - 1 = {excess:.3g})"
        )
    return 0.5 / excess


def are(numerator_multiple: float, denominator_multiple: float) -> float:
    """Asymptotic relative efficiency: ratio of two scalar multiples."""
    if numerator_multiple <= 0 or denominator_multiple <= 0:
        raise DomainError("scalar multiples must be positive")
    return numerator_multiple / denominator_multiple


def efficiency_report(w, noise) -> EfficiencyReport:
    return EfficiencyReport(
        multiple_R=scalar_multiple_R(w, noise),
        multiple_LAD=scalar_multiple_LAD(noise),
        multiple_ML=scalar_multiple_ML(noise),
    )


def asymptotic_covariance(phi0, multiple: float, n: int) -> np.ndarray:
    """``(multiple / n) * (sigma^{-2} Gamma_p)^{-1}``; depends on phi0 only through the AR structure."""
    if multiple <= 0:
        raise DomainError("the scalar multiple must be positive")
    if n < 1:
        raise DomainError("n must be positive")
    acv = ar_autocovariance(phi0, 1.0)
    try:
        inv = np.linalg.inv(acv.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - causal phi gives PD Gamma
        raise QuadratureError("Gamma_p is singular") from exc
    return (multiple / n) * inv


def asymptotic_sd(phi0, multiple: float, n: int) -> np.ndarray:
    return np.sqrt(np.diag(asymptotic_covariance(phi0, multiple, n)))
