"""Score (weight) functions on the unit interval.

A weight function ``lam`` must be strictly increasing and odd about 1/2,
``lam(s) = -lam(1 - s)``, with a bounded, uniformly continuous derivative.
Each class exposes vectorized ``eval`` and ``deriv`` methods; calling the
object evaluates with a domain check.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from allpass.errors import DomainError

_SQRT_2PI = np.sqrt(2.0 * np.pi)


class WeightFunction:
    """Base class. Subclasses implement ``eval`` and ``deriv``."""

    name = "weight"

    def eval(self, s):
        raise NotImplementedError

    def deriv(self, s):
        raise NotImplementedError

    def breakpoints(self):
        """Interior points of (0, 1) where quadrature should split."""
        return (0.5,)

    def __call__(self, s):
        return weight_eval(self, s)

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class Wilcoxon(WeightFunction):
    """Linear scores ``lam(s) = s - 1/2``."""

    name = "wilcoxon"

    def eval(self, s):
        return np.asarray(s, dtype=float) - 0.5

    def deriv(self, s):
        return np.ones_like(np.asarray(s, dtype=float))


class ArctanWeight(WeightFunction):
    """``lam_m(s) = (2/pi) * arctan(m (s - 1/2))``.

    Approaches the sign function as ``m`` grows, which makes R-estimation
    asymptotically equivalent to least absolute deviations.
    """

    def __init__(self, m: float):
        if not np.isfinite(m) or m <= 0:
            raise DomainError(f"arctan weight needs m > 0, got {m}")
        self.m = float(m)
        self.name = f"arctan-{m:g}"

    def eval(self, s):
        return (2.0 / np.pi) * np.arctan(self.m * (np.asarray(s, dtype=float) - 0.5))

    def deriv(self, s):
        u = self.m * (np.asarray(s, dtype=float) - 0.5)
        return (2.0 * self.m / np.pi) / (1.0 + u * u)

    def breakpoints(self):
        offsets = [k / self.m for k in (1.0, 5.0, 25.0)]
        pts = [0.5 - d for d in offsets if d < 0.5] + [0.5] + [0.5 + d for d in offsets if d < 0.5]
        return tuple(sorted(pts))


class VanDerWaerden(WeightFunction):
    """Bounded normal scores.

    Equal to the standard normal quantile on ``[eps, 1 - eps]`` and continued
    linearly (with matching slope) outside, so the derivative stays bounded.
    """

    def __init__(self, eps: float = 1e-4):
        if not 0 < eps < 0.5:
            raise DomainError(f"clip level must lie in (0, 1/2), got {eps}")
        self.eps = float(eps)
        self.name = "vdw" if eps == 1e-4 else f"vdw-{eps:g}"
        self._q = float(ndtri(eps))
        self._slope = _SQRT_2PI * np.exp(0.5 * self._q ** 2)

    def eval(self, s):
        s = np.asarray(s, dtype=float)
        inner = ndtri(np.clip(s, self.eps, 1.0 - self.eps))
        lo = self._q + (s - self.eps) * self._slope
        hi = -self._q + (s - 1.0 + self.eps) * self._slope
        return np.where(s < self.eps, lo, np.where(s > 1.0 - self.eps, hi, inner))

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        q = ndtri(np.clip(s, self.eps, 1.0 - self.eps))
        return _SQRT_2PI * np.exp(0.5 * q * q)

    def breakpoints(self):
        return (self.eps, 0.5, 1.0 - self.eps)


class OptimalWeight(WeightFunction):
    """Score proportional to ``-f'(F^{-1}(s)) / f(F^{-1}(s))`` for a noise law.

    Normalized so that ``lam(3/4) = 1``. Requires a noise model with a smooth
    score function.
    """

    def __init__(self, noise):
        if not getattr(noise, "smooth_score", False):
            raise DomainError(
                f"{noise.name} noise has no differentiable score; the optimal "
                "weight is not differentiable at 1/2"
            )
        self.noise = noise
        self.name = f"optimal-{noise.name}"
        self._scale = 1.0 / float(noise.score(noise.quantile(0.75)))

    def _quantile(self, s):
        x = self.noise.quantile(s)
        f = self.noise.pdf(x)
        if np.any(np.asarray(f) <= 0):
            raise DomainError("density vanishes at an interior quantile")
        return x, f

    def eval(self, s):
        x, _ = self._quantile(s)
        return self._scale * self.noise.score(x)

    def deriv(self, s):
        x, f = self._quantile(s)
        return self._scale * self.noise.score_deriv(x) / f


def weight_eval(w: WeightFunction, s):
    """Evaluate ``w`` at ``s``, rejecting arguments outside (0, 1)."""
    arr = np.asarray(s, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("weight functions are defined on the open interval (0, 1)")
    out = w.eval(arr)
    return float(out) if out.ndim == 0 else out


def make_arctan_weight(m: float) -> ArctanWeight:
    return ArctanWeight(m)


def make_optimal_weight(noise) -> OptimalWeight:
    return OptimalWeight(noise)


def get_weight(name: str, m: float = 500.0) -> WeightFunction:
    """Look up a weight by name: ``wilcoxon``, ``arctan``/``lad-like``, ``vdw``."""
    key = name.lower()
    if key == "wilcoxon":
        return Wilcoxon()
    if key in ("arctan", "lad-like", "lad"):
        return ArctanWeight(m)
    if key in ("vdw", "van-der-waerden", "normal"):
        return VanDerWaerden()
    if key.startswith("arctan-"):
        return ArctanWeight(float(key.split("-", 1)[1]))
    raise DomainError(f"unknown weight function {name!r}")
