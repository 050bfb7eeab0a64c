"""Residual-based identification of noninvertibility.

A causal, invertible fit to a noninvertible series leaves residuals that are
white but dependent; they follow a causal all-pass model whose order equals
the number of moving-average roots inside the unit circle. The workflow is:
prefit a causal AR model, check the residual ACFs of ``w``, ``w^2`` and
``|w|``, select and fit the all-pass order, then check the all-pass residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.signal import lfilter

from allpass.errors import DomainError
from allpass.estimation import Z_975, FitOptions, FitResult, attach_inference
from allpass.order import OrderReport, select_order
from allpass.weights import Wilcoxon


def sample_acf(x, max_lag: int) -> np.ndarray:
    """Mean-corrected sample autocorrelations at lags 1..max_lag (divisor n)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag < 1 or n <= max_lag:
        raise DomainError(f"need 1 <= max_lag < n, got max_lag={max_lag}, n={n}")
    d = x - x.mean()
    c0 = d @ d
    if not c0 > 0:
        raise DomainError("autocorrelation is undefined for a constant series")
    return np.array([d[:-h] @ d[h:] for h in range(1, max_lag + 1)]) / c0


def sample_acov(x, max_lag: int) -> np.ndarray:
    """Mean-corrected sample autocovariances at lags 0..max_lag (divisor n)."""
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    n = x.size
    return np.array([d[: n - h] @ d[h:] for h in range(max_lag + 1)]) / n


def prefit_ar(x, p: int):
    """Yule-Walker AR(p) fit; returns ``(phi_hat, w)`` with ``w_t = phi_hat(B) x_t``, t = p+1..n.

    The series is mean-corrected first. Yule-Walker estimates from the
    divisor-n autocovariances are always causal.
    """
    x = np.asarray(x, dtype=float)
    if p < 1 or x.size <= 2 * p:
        raise DomainError(f"need p >= 1 and n > 2p, got n={x.size}, p={p}")
    acov = sample_acov(x, p)
    if not acov[0] > 0:
        raise DomainError("sample autocovariance matrix is singular")
    try:
        phi = solve_toeplitz(acov[:p], acov[1:p + 1])
    except np.linalg.LinAlgError as exc:
        raise DomainError("sample autocovariance matrix is singular") from exc
    d = x - x.mean()
    w = lfilter(np.concatenate(([1.0], -phi)), [1.0], d)[p:]
    return phi, w


@dataclass(frozen=True)
class AcfDiagnostics:
    lags: np.ndarray
    acf_w: np.ndarray
    acf_w2: np.ndarray
    acf_absw: np.ndarray
    bound: float

    @property
    def exceedances(self) -> dict:
        return {
            "w": int(np.sum(np.abs(self.acf_w) > self.bound)),
            "w2": int(np.sum(np.abs(self.acf_w2) > self.bound)),
            "absw": int(np.sum(np.abs(self.acf_absw) > self.bound)),
        }

    def rows(self):
        """``(lag, acf_w, acf_w2, acf_absw, bound)`` tuples for CSV output."""
        for i, lag in enumerate(self.lags):
            yield int(lag), self.acf_w[i], self.acf_w2[i], self.acf_absw[i], self.bound


def diagnose(w, max_lag: int = 20) -> AcfDiagnostics:
    """ACFs of ``w``, ``w^2`` and ``|w|`` with the ``1.96/sqrt(n)`` white-noise bound."""
    w = np.asarray(w, dtype=float)
    return AcfDiagnostics(
        lags=np.arange(1, max_lag + 1),
        acf_w=sample_acf(w, max_lag),
        acf_w2=sample_acf(w * w, max_lag),
        acf_absw=sample_acf(np.abs(w), max_lag),
        bound=Z_975 / np.sqrt(w.size),
    )


@dataclass
class DeconvResult:
    order: OrderReport
    fit: FitResult | None
    diagnostics: AcfDiagnostics
    input_diagnostics: AcfDiagnostics


def deconv_identify(w, P: int, weight=None, opts: FitOptions | None = None,
                    max_lag: int = 20) -> DeconvResult:
    """Select the all-pass order of residuals ``w`` and diagnose the all-pass residuals.

    When the selected order is 0 no all-pass model is fitted and the
    diagnostics describe ``w`` itself.
    """
    weight = Wilcoxon() if weight is None else weight
    opts = FitOptions() if opts is None else opts
    w = np.asarray(w, dtype=float)
    before = diagnose(w, max_lag)
    report = select_order(w, P, weight, opts)
    chosen = None
    final = w
    if report.selected_r:
        chosen = report.fit_for(report.selected_r)
        if chosen.tau_hat is None:
            attach_inference(chosen, w, weight, opts.kernel)
        final = chosen.residuals
    return DeconvResult(order=report, fit=chosen, diagnostics=diagnose(final, max_lag),
                        input_diagnostics=before)
