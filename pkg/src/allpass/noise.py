"""Zero-mean noise distributions used to drive and analyse all-pass models.

Every family is parameterized by its variance. Each model provides the
density, distribution function, quantile, a sampler, and the location score
``-f'(x)/f(x)`` needed for efficiency calculations.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize, special, stats

from allpass.errors import DomainError


class NoiseModel:
    """Base class for a continuous, zero-mean noise law."""

    name = "noise"
    symmetric = True
    smooth_score = True

    def __init__(self, variance: float = 1.0):
        if not np.isfinite(variance) or variance <= 0:
            raise DomainError(f"variance must be positive and finite, got {variance}")
        self.variance = float(variance)

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.variance))

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def sample(self, count: int, rng) -> np.ndarray:
        raise NotImplementedError

    def score(self, x):
        """Location score ``-f'(x) / f(x)``."""
        raise NotImplementedError

    def score_deriv(self, x):
        raise NotImplementedError

    def pdf_deriv(self, x):
        return -self.score(x) * self.pdf(x)

    @property
    def median(self) -> float:
        return 0.0 if self.symmetric else float(self.quantile(0.5))

    def __repr__(self):
        return f"{type(self).__name__}(variance={self.variance:g})"


def _check_unit(u):
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise DomainError("quantile argument must lie in (0, 1)")
    return u


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


class Laplace(NoiseModel):
    """Two-sided exponential, ``f(x) = exp(-sqrt(2)|x|/sigma) / (sqrt(2) sigma)``."""

    name = "laplace"
    smooth_score = False

    def __init__(self, variance: float = 1.0):
        super().__init__(variance)
        self.b = self.sd / np.sqrt(2.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar(np.exp(-np.abs(x) / self.b) / (2.0 * self.b))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        half = 0.5 * np.exp(-np.abs(x) / self.b)
        return _scalar(np.where(x < 0, half, 1.0 - half))

    def quantile(self, u):
        u = _check_unit(u)
        c = u - 0.5
        return _scalar(-self.b * np.sign(c) * np.log1p(-2.0 * np.abs(c)))

    def sample(self, count, rng):
        return rng.laplace(0.0, self.b, size=count)

    def score(self, x):
        return _scalar(np.sign(np.asarray(x, dtype=float)) / self.b)

    def score_deriv(self, x):
        # zero away from the kink at 0
        return _scalar(np.zeros_like(np.asarray(x, dtype=float)))


class Logistic(NoiseModel):
    name = "logistic"

    def __init__(self, variance: float = 1.0):
        super().__init__(variance)
        self.s = self.sd * np.sqrt(3.0) / np.pi

    def pdf(self, x):
        e = special.expit(np.asarray(x, dtype=float) / self.s)
        return _scalar(e * (1.0 - e) / self.s)

    def cdf(self, x):
        return _scalar(special.expit(np.asarray(x, dtype=float) / self.s))

    def quantile(self, u):
        return _scalar(self.s * special.logit(_check_unit(u)))

    def sample(self, count, rng):
        return rng.logistic(0.0, self.s, size=count)

    def score(self, x):
        return _scalar(np.tanh(np.asarray(x, dtype=float) / (2.0 * self.s)) / self.s)

    def score_deriv(self, x):
        c = np.cosh(np.asarray(x, dtype=float) / (2.0 * self.s))
        return _scalar(0.5 / (self.s ** 2 * c * c))


class StudentT(NoiseModel):
    """Student's t with ``df > 2`` degrees of freedom, rescaled to the given variance."""

    def __init__(self, df: float, variance: float = 1.0):
        if not np.isfinite(df) or df <= 2:
            raise DomainError(f"Student t needs df > 2 for a finite variance, got {df}")
        super().__init__(variance)
        self.df = float(df)
        self.scale = self.sd * np.sqrt((self.df - 2.0) / self.df)
        self._dist = stats.t(self.df, scale=self.scale)
        self.name = f"t{df:g}"

    def pdf(self, x):
        return _scalar(self._dist.pdf(x))

    def cdf(self, x):
        return _scalar(self._dist.cdf(x))

    def quantile(self, u):
        return _scalar(self._dist.ppf(_check_unit(u)))

    def sample(self, count, rng):
        return self.scale * rng.standard_t(self.df, size=count)

    def score(self, x):
        y = np.asarray(x, dtype=float) / self.scale
        return _scalar((self.df + 1.0) * y / (self.df + y * y) / self.scale)

    def score_deriv(self, x):
        y = np.asarray(x, dtype=float) / self.scale
        v = self.df
        return _scalar((v + 1.0) * (v - y * y) / (v + y * y) ** 2 / self.scale ** 2)

    def __repr__(self):
        return f"StudentT(df={self.df:g}, variance={self.variance:g})"


class Gaussian(NoiseModel):
    """Normal noise. All-pass parameters are not identifiable under it."""

    name = "gaussian"

    def pdf(self, x):
        return _scalar(stats.norm.pdf(np.asarray(x, dtype=float) / self.sd) / self.sd)

    def cdf(self, x):
        return _scalar(special.ndtr(np.asarray(x, dtype=float) / self.sd))

    def quantile(self, u):
        return _scalar(self.sd * special.ndtri(_check_unit(u)))

    def sample(self, count, rng):
        return self.sd * rng.standard_normal(count)

    def score(self, x):
        return _scalar(np.asarray(x, dtype=float) / self.variance)

    def score_deriv(self, x):
        return _scalar(np.full_like(np.asarray(x, dtype=float), 1.0 / self.variance))


class GaussianMixture(NoiseModel):
    """Finite mixture of normals with zero overall mean.

    With no arguments this is ``0.4 N(-1, 1) + 0.6 N(2/3, 3^2)``, an
    asymmetric law. Passing ``variance`` rescales the components.
    """

    symmetric = False

    def __init__(self, weights=(0.4, 0.6), means=(-1.0, 2.0 / 3.0), sds=(1.0, 3.0),
                 variance: float | None = None):
        w = np.asarray(weights, dtype=float)
        mu = np.asarray(means, dtype=float)
        sd = np.asarray(sds, dtype=float)
        if not (w.shape == mu.shape == sd.shape) or np.any(w <= 0) or np.any(sd <= 0):
            raise DomainError("mixture needs matching positive weights and sds")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("mixture weights must sum to 1")
        if abs(w @ mu) > 1e-12 * max(1.0, np.abs(mu).max()):
            raise DomainError("mixture must have mean zero")
        natural = float(w @ (sd ** 2 + mu ** 2))
        a = 1.0 if variance is None else np.sqrt(variance / natural)
        super().__init__(natural * a * a)
        self.weights, self.means, self.sds = w, mu * a, sd * a
        self.name = "mixture"

    def _components(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        y = (x - self.means) / self.sds
        dens = self.weights * np.exp(-0.5 * y * y) / (np.sqrt(2.0 * np.pi) * self.sds)
        return y, dens

    def pdf(self, x):
        _, dens = self._components(x)
        return _scalar(dens.sum(axis=-1))

    def pdf_deriv(self, x):
        y, dens = self._components(x)
        return _scalar((-dens * y / self.sds).sum(axis=-1))

    def _pdf_second(self, x):
        y, dens = self._components(x)
        return (dens * (y * y - 1.0) / self.sds ** 2).sum(axis=-1)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        return _scalar((self.weights * special.ndtr((x - self.means) / self.sds)).sum(axis=-1))

    def _quantile_one(self, u):
        lo = float(np.min(self.means - 40.0 * self.sds))
        hi = float(np.max(self.means + 40.0 * self.sds))
        return optimize.brentq(lambda t: self.cdf(t) - u, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)

    def quantile(self, u):
        u = _check_unit(u)
        out = np.vectorize(self._quantile_one, otypes=[float])(u)
        return _scalar(out)

    def sample(self, count, rng):
        comp = rng.choice(len(self.weights), size=count, p=self.weights)
        return self.means[comp] + self.sds[comp] * rng.standard_normal(count)

    def score(self, x):
        return _scalar(-np.asarray(self.pdf_deriv(x)) / np.asarray(self.pdf(x)))

    def score_deriv(self, x):
        f = np.asarray(self.pdf(x))
        f1 = np.asarray(self.pdf_deriv(x))
        f2 = self._pdf_second(x)
        return _scalar(-(f2 * f - f1 * f1) / (f * f))

    def __repr__(self):
        return f"GaussianMixture(variance={self.variance:g})"


def noise_pdf(noise: NoiseModel, x):
    return noise.pdf(x)


def noise_cdf(noise: NoiseModel, x):
    return noise.cdf(x)


def noise_quantile(noise: NoiseModel, u):
    return noise.quantile(u)


def noise_sample(noise: NoiseModel, count: int, rng) -> np.ndarray:
    return noise.sample(count, np.random.default_rng(rng))


def make_noise(name: str, variance: float | None = None, df: float | None = None) -> NoiseModel:
    """Build a noise model from a CLI-style name.

    ``t3`` is shorthand for ``t`` with ``df=3``. When ``variance`` is None the
    variance is 1, except for ``mixture``, which keeps its natural variance.
    """
    key = name.lower()
    if key == "mixture":
        return GaussianMixture(variance=variance)
    var = 1.0 if variance is None else variance
    if key == "laplace":
        return Laplace(var)
    if key == "logistic":
        return Logistic(var)
    if key in ("gaussian", "normal"):
        return Gaussian(var)
    if key == "t" or (key.startswith("t") and key[1:].replace(".", "", 1).isdigit()):
        nu = df if key == "t" else float(key[1:])
        if nu is None:
            raise DomainError("Student t noise needs a df value")
        return StudentT(nu, var)
    raise DomainError(f"unknown noise family {name!r}")
