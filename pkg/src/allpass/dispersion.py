"""Jaeckel's rank dispersion of all-pass residuals.

    D(phi) = sum_t lam(R_t / (m + 1)) z_t(phi),   m = n - p

where ``R_t`` is the rank of ``z_t(phi)``. Equivalently, the scores
``lam(t / (m + 1))`` applied to the order statistics. ``D`` is nonnegative,
and zero only when all residuals are equal.

When the scores are odd about the middle rank (every weight that is odd
about 1/2), D is evaluated in the paired form
``sum_{t > m/2} lam_t (z_(t) - z_(m+1-t))``. It is algebraically the same sum,
but it is exactly zero for equal residuals and never negative in floating
point.
"""

from __future__ import annotations

import numpy as np

from allpass import kernels
from allpass.residuals import _check


def ranks(z) -> np.ndarray:
    """Ascending ranks 1..m; ties are broken by position."""
    z = np.asarray(z, dtype=float)
    order = np.argsort(z, kind="stable")
    out = np.empty(z.size, dtype=np.int64)
    out[order] = np.arange(1, z.size + 1)
    return out


def rank_scores(w, m: int) -> np.ndarray:
    """Scores ``lam(t / (m + 1))`` for t = 1..m."""
    return np.asarray(w.eval(np.arange(1, m + 1) / (m + 1.0)), dtype=float)


class _SortedForm:
    """Applies the scores to sorted residuals, pairing them when the scores are odd."""

    def __init__(self, scores):
        scores = np.asarray(scores, dtype=float)
        m = scores.size
        h = m // 2
        top = scores[m - h:][::-1]  # lam_m, lam_{m-1}, ..., paired with z_(m) - z_(1), ...
        tol = 1e-12 * max(1.0, float(np.max(np.abs(scores))) if m else 1.0)
        self.paired = bool(np.all(np.abs(top + scores[:h]) <= tol)) and (
            m % 2 == 0 or abs(scores[h]) <= tol)
        self.scores = scores
        self.top = top
        self.h = h

    def __call__(self, zs):
        """D for sorted residuals ``zs`` of shape (m,) or (k, m)."""
        if not self.paired:
            return zs @ self.scores
        h = self.h
        spread = zs[..., ::-1][..., :h] - zs[..., :h]
        return spread @ self.top


def dispersion_of(z, w) -> float:
    """D for a raw residual vector, from the ranks."""
    z = np.asarray(z, dtype=float)
    zs = np.empty_like(z)
    zs[ranks(z) - 1] = z
    return float(_SortedForm(rank_scores(w, z.size))(zs))


def dispersion(phi, x, w) -> float:
    """D(phi) for series ``x`` and weight ``w`` (order-statistic form)."""
    phi, x = _check(phi, x)
    z = kernels.allpass_residuals(phi, x)
    return float(_SortedForm(rank_scores(w, z.size))(np.sort(z)))


class DispersionObjective:
    """D as a function of phi for a fixed series, with scores cached.

    No causality check is made here; callers must pass causal coefficients
    (the estimator only ever evaluates points produced by ``pacf_to_phi``).
    """

    def __init__(self, x, p: int, w):
        self.x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
        self.p = int(p)
        self.w = w
        self.m = self.x.size - self.p
        self.scores = rank_scores(w, self.m)
        self._form = _SortedForm(self.scores)

    def __call__(self, phi) -> float:
        z = kernels.allpass_residuals(np.ascontiguousarray(phi, dtype=np.float64), self.x)
        return float(self._form(np.sort(z)))

    def batch(self, phis, chunk: int = 256) -> np.ndarray:
        phis = np.ascontiguousarray(np.asarray(phis, dtype=np.float64).reshape(-1, self.p))
        out = np.empty(phis.shape[0])
        for start in range(0, phis.shape[0], chunk):
            block = kernels.batch_residuals(phis[start:start + chunk], self.x)
            block.sort(axis=1)
            out[start:start + chunk] = self._form(block)
        return out
