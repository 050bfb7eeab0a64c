"""Score moments of a (weight, noise) pair.

    J = int_0^1 lam(s)^2 ds
    K = int_0^1 F^{-1}(s) lam(s) ds     = E[Z lam(F(Z))]
    L = int_0^1 f(F^{-1}(s)) lam'(s) ds = E[f(Z) lam'(F(Z))]

K and L are integrated on the real line after the substitution ``s = F(x)``,
which removes the endpoint singularity of the quantile function.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from allpass.errors import QuadratureError

# quantile levels that split the real line into well-scaled pieces
_SPLIT_LEVELS = (1e-6, 1e-2, 0.25, 0.5, 0.75, 0.99, 1 - 1e-6)


@dataclass(frozen=True)
class ScoreMoments:
    J: float
    K: float
    L: float
    variance: float

    @property
    def score_margin(self) -> float:
        """``sigma^2 L - K``; must be positive for the asymptotics to apply."""
        return self.variance * self.L - self.K

    @property
    def margin_positive(self) -> bool:
        return self.score_margin > 1e-7 * max(1.0, abs(self.K))

    @property
    def cauchy_schwarz_gap(self) -> float:
        """``sigma^2 J - K^2``, strictly positive for bounded weights."""
        return self.variance * self.J - self.K ** 2


def _quad(func, a, b, rtol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=1e-15, epsrel=rtol * 1e-2,
                             limit=500, full_output=1)
    val, err = out[0], out[1]
    if len(out) > 3 and err > max(rtol * abs(val), 1e-13):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {out[3]}", err)
    return val, err


def integrate_pieces(func, points, rtol=1e-8):
    """Sum of adaptive quadratures over consecutive pairs of ``points``."""
    total = 0.0
    total_err = 0.0
    for a, b in zip(points[:-1], points[1:]):
        if b > a:
            v, e = _quad(func, a, b, rtol)
            total += v
            total_err += e
    if total_err > max(rtol * abs(total), 1e-12):
        raise QuadratureError("accumulated quadrature error exceeds tolerance", total_err)
    return total


def real_line_points(noise, weight=None):
    """Breakpoints on the real line for integrating against ``noise``."""
    levels = set(_SPLIT_LEVELS)
    if weight is not None:
        levels.update(weight.breakpoints())
    xs = np.unique(np.asarray(noise.quantile(np.array(sorted(levels)))))
    med = noise.median
    xs = np.unique(np.concatenate((xs, [med, 0.0])))
    return [-np.inf, *xs.tolist(), np.inf]


def weight_energy(w, rtol=1e-8) -> float:
    """``J = int_0^1 lam(s)^2 ds``."""
    pts = [0.0, *sorted(set(w.breakpoints())), 1.0]
    return integrate_pieces(lambda s: float(w.eval(s)) ** 2, pts, rtol)


def score_moments(w, noise, rtol=1e-8) -> ScoreMoments:
    """Compute J, K and L for weight ``w`` under ``noise`` by adaptive quadrature."""
    pts = real_line_points(noise, w)
    J = weight_energy(w, rtol)
    K = integrate_pieces(lambda x: x * float(w.eval(noise.cdf(x))) * noise.pdf(x), pts, rtol)
    L = integrate_pieces(
        lambda x: noise.pdf(x) ** 2 * float(w.deriv(noise.cdf(x))), pts, rtol
    )
    return ScoreMoments(J=J, K=K, L=L, variance=noise.variance)
