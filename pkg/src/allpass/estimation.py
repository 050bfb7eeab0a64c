"""R-estimation of all-pass coefficients by minimizing Jaeckel's dispersion.

The minimization is global over the causal region: random starting points
are drawn in partial-autocorrelation coordinates, the best few are refined
with Nelder-Mead in ``u = artanh(kappa)`` coordinates (so every trial point
is causal), and the overall best terminal point is kept.

Standard errors use the plug-in scale

    tau^2 = (J - (K_z / s)^2) / (2 (s L_z - K_z / s)^2)

with ``s`` the residual root mean square, ``K_z = D(phi_hat) / n`` and
``L_z`` a kernel-density estimate of ``int f_z(F_z^{-1}(u)) lam'(u) du``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, stats

from allpass.asymptotics import ar_autocovariance
from allpass.dispersion import DispersionObjective
from allpass.errors import AssumptionError, CausalityError, DomainError, EstimationError
from allpass.residuals import AllPassParams, pacf_to_phi, phi_to_pacf, residuals
from allpass.scores import weight_energy
from allpass.weights import Wilcoxon

log = logging.getLogger(__name__)

Z_975 = 1.96  # two-sided 95% normal quantile, at the conventional two decimals
_GAUSS_REACH = 8.5  # exp(-8.5^2 / 2) < 1e-15
# |kappa| <= 1 - 1e-6 keeps every root clear of the causality margin
_U_MAX = float(np.arctanh(1.0 - 1e-6))


def silverman_bandwidth(z, n: int | None = None) -> float:
    """``0.9 n^{-1/5} min(s, IQR / 1.34)``.

    ``s`` is the root mean square ``sqrt(sum z^2 / n)`` and ``n`` defaults to
    ``len(z)``; pass the full series length when ``z`` holds n - p residuals.
    """
    z = np.asarray(z, dtype=float)
    if z.size < 2:
        raise DomainError("bandwidth needs at least two residuals")
    n = z.size if n is None else int(n)
    s = np.sqrt(np.sum(z * z) / n)
    q75, q25 = np.percentile(z, [75, 25])
    spread = min(s, (q75 - q25) / 1.34)
    if not spread > 0:
        raise DomainError("residuals have zero spread; bandwidth is degenerate")
    return 0.9 * n ** (-0.2) * spread


def _kernel_fn(kernel: str):
    key = kernel.lower()
    if key in ("gaussian", "normal"):
        c = 1.0 / np.sqrt(2.0 * np.pi)
        return lambda u: c * np.exp(-0.5 * u * u)
    if key.startswith("t") and key[1:]:
        df = float(key[1:])
        if df <= 0:
            raise DomainError("t kernel needs positive df")
        return stats.t(df).pdf
    raise DomainError(f"unknown kernel {kernel!r}")


class KernelDensityEstimate:
    """``f(s) = (b n)^{-1} sum_t kappa((s - z_t) / b)``.

    The divisor is the series length ``n`` (not the number of residuals), so
    the estimate integrates to ``len(sample) / n``.
    """

    def __init__(self, sample, bandwidth: float, n: int | None = None, kernel: str = "gaussian"):
        if not bandwidth > 0:
            raise DomainError(f"bandwidth must be positive, got {bandwidth}")
        self.sample = np.asarray(sample, dtype=float)
        self.bandwidth = float(bandwidth)
        self.n = self.sample.size if n is None else int(n)
        self.kernel = kernel
        self._k = _kernel_fn(kernel)
        self._gaussian = kernel.lower() in ("gaussian", "normal")
        self._sorted = np.sort(self.sample)

    def __call__(self, s, chunk: int = 512):
        s = np.asarray(s, dtype=float)
        flat = s.reshape(-1)
        order = np.argsort(flat, kind="stable")
        q = flat[order]
        vals = np.empty(q.size)
        reach = _GAUSS_REACH * self.bandwidth
        for a in range(0, q.size, chunk):
            block = q[a:a + chunk]
            data = self._sorted
            if self._gaussian:
                lo, hi = np.searchsorted(data, [block[0] - reach, block[-1] + reach])
                data = data[lo:hi]
            u = (block[:, None] - data[None, :]) / self.bandwidth
            vals[a:a + chunk] = self._k(u).sum(axis=1)
        out = np.empty(q.size)
        out[order] = vals / (self.bandwidth * self.n)
        return float(out[0]) if s.ndim == 0 else out.reshape(s.shape)


def kernel_density(z, b: float, kernel: str = "gaussian", n: int | None = None) -> KernelDensityEstimate:
    return KernelDensityEstimate(z, b, n=n, kernel=kernel)


@dataclass(frozen=True)
class TauEstimate:
    s_hat: float
    K_hat_z: float
    L_hat_z: float
    tau_hat: float
    bandwidth: float


def estimate_tau(phi_hat, x, w, kernel: str = "gaussian", J: float | None = None) -> TauEstimate:
    """Plug-in estimate of the asymptotic scale ``tau`` at ``phi_hat``.

    Raises :class:`AssumptionError` when ``s L_z - K_z / s <= 0`` in sample.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    z = residuals(phi_hat, x)
    m = z.size
    zs = np.sort(z)
    s_hat = float(np.sqrt(np.sum(z * z) / n))
    D = float(np.asarray(w.eval(np.arange(1, m + 1) / (m + 1.0))) @ zs)
    K = D / n
    b = silverman_bandwidth(z, n)
    fhat = KernelDensityEstimate(z, b, n=n, kernel=kernel)
    # lam'(t / (n - p)) paired with the t-th order statistic
    L = float(np.asarray(w.deriv(np.arange(1, m + 1) / m)) @ fhat(zs)) / n
    if J is None:
        J = weight_energy(w)
    denom = s_hat * L - K / s_hat
    if not denom > 0:
        raise AssumptionError(
            f"in-sample positivity check (s L > K / s) failed: s L_z - K_z / s = {denom:.3g} <= 0"
        )
    num = J - (K / s_hat) ** 2
    tau = float(np.sqrt(num / (2.0 * denom ** 2)))
    return TauEstimate(s_hat=s_hat, K_hat_z=K, L_hat_z=L, tau_hat=tau, bandwidth=b)


@dataclass(frozen=True)
class FitOptions:
    n_starts: int = 1000
    n_refine: int = 12
    delta: float = 0.01
    seed: object = 0
    kernel: str = "gaussian"
    xatol: float = 1e-8
    fatol_per_obs: float = 1e-10
    maxfev_per_param: int = 2000

    def with_seed(self, seed) -> "FitOptions":
        return replace(self, seed=seed)


@dataclass
class FitResult:
    phi_hat: AllPassParams
    objective: float
    n: int
    p: int
    weight: str
    seed: object
    residuals: np.ndarray
    s_hat: float | None = None
    K_hat_z: float | None = None
    L_hat_z: float | None = None
    tau_hat: float | None = None
    bandwidth: float | None = None
    covariance: np.ndarray | None = None
    ci: np.ndarray | None = None  # shape (p, 2)
    starts_used: int = 0
    converged: bool = False
    start_objectives: np.ndarray = field(default=None, repr=False)
    refined: list = field(default_factory=list, repr=False)
    note: str = ""

    @property
    def std_errors(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.sqrt(np.diag(self.covariance))

    def as_dict(self) -> dict:
        se = self.std_errors
        return {
            "phi_hat": self.phi_hat.phi.tolist(),
            "std_errors": None if se is None else se.tolist(),
            "ci_lower": None if self.ci is None else self.ci[:, 0].tolist(),
            "ci_upper": None if self.ci is None else self.ci[:, 1].tolist(),
            "tau_hat": self.tau_hat,
            "s_hat": self.s_hat,
            "K_hat_z": self.K_hat_z,
            "L_hat_z": self.L_hat_z,
            "objective": self.objective,
            "n": self.n,
            "p": self.p,
            "weight": self.weight,
            "seed": self.seed,
            "converged": self.converged,
            "note": self.note,
        }


def _kappa_to_phi(u):
    return pacf_to_phi(np.tanh(np.clip(u, -_U_MAX, _U_MAX)))


def draw_starts(p: int, count: int, delta: float, rng) -> np.ndarray:
    """Random causal coefficient vectors: PACF uniform on ``(-1 + delta, 1 - delta)^p``."""
    kappa = rng.uniform(-1.0 + delta, 1.0 - delta, size=(count, p))
    return kappa, np.array([pacf_to_phi(k) for k in kappa]).reshape(count, p)


def fit(x, p: int, w=None, opts: FitOptions | None = None, inference: bool = True,
        extra_starts=None) -> FitResult:
    """R-estimate an order-``p`` causal all-pass model for ``x``.

    Parameters
    ----------
    x : array_like
        Observed series, length ``n > 4p``.
    p : int
        All-pass order.
    w : WeightFunction, optional
        Score function; Wilcoxon by default.
    opts : FitOptions, optional
        Multi-start and local-search settings, including the RNG seed.
    inference : bool
        Attach the plug-in scale, covariance and 95% intervals.
    extra_starts : array_like, optional
        Causal coefficient vectors, shape ``(k, p)``, refined in addition to
        the best random starts (for example a lower-order fit padded with
        zeros, which keeps nested fits from doing worse than their parent).

    Returns
    -------
    FitResult
        If the in-sample positivity check (s L > K / s) fails the estimate is still returned, with
        ``covariance`` and ``ci`` left as None and the reason in ``note``.
    """
    w = Wilcoxon() if w is None else w
    opts = FitOptions() if opts is None else opts
    x = np.ascontiguousarray(np.asarray(x, dtype=float))
    p = int(p)
    n = x.size
    if p < 1:
        raise DomainError("order p must be at least 1")
    if n <= 4 * p:
        raise DomainError(f"need n > 4p observations, got n={n}, p={p}")
    if not np.all(np.isfinite(x)):
        raise DomainError("series contains non-finite values")

    obj = DispersionObjective(x, p, w)
    rng = np.random.default_rng(opts.seed)
    kappa, phis = draw_starts(p, opts.n_starts, opts.delta, rng)
    d0 = obj.batch(phis)
    ok = np.isfinite(d0)
    if not ok.any():
        raise EstimationError("dispersion could not be evaluated at any starting value")
    d0 = np.where(ok, d0, np.inf)
    order = np.argsort(d0, kind="stable")[: min(opts.n_refine, int(ok.sum()))]
    if extra_starts is not None:
        extra = np.asarray(extra_starts, dtype=float).reshape(-1, p)
        extra_kappa = np.array([phi_to_pacf(AllPassParams(e).phi) for e in extra]).reshape(-1, p)
        # keep the extra PACFs off the clip so arctanh stays finite
        extra_kappa = np.clip(extra_kappa, -np.tanh(_U_MAX), np.tanh(_U_MAX))
        kappa = np.vstack((kappa, extra_kappa))
        d0 = np.concatenate((d0, obj.batch(extra)))
        order = np.concatenate((order, np.arange(opts.n_starts, opts.n_starts + extra.shape[0])))

    def target(u):
        val = obj(_kappa_to_phi(u))
        return val if np.isfinite(val) else np.inf

    nm_opts = {
        "xatol": opts.xatol,
        "fatol": opts.fatol_per_obs * n,
        "maxfev": opts.maxfev_per_param * p,
    }
    refined = []
    terminals = []
    for idx in order:
        u0 = np.arctanh(np.clip(kappa[idx], -np.tanh(_U_MAX), np.tanh(_U_MAX)))
        res = optimize.minimize(target, u0, method="Nelder-Mead", options=nm_opts)
        # Nelder-Mead keeps x0 in the simplex, so res.fun <= d0[idx]
        refined.append((int(idx), float(d0[idx]), float(res.fun), bool(res.success)))
        terminals.append(res)
    phi_hat = None
    for res in sorted(terminals, key=lambda r: r.fun):
        try:
            phi_hat = AllPassParams(_kappa_to_phi(res.x))
            break
        except CausalityError:
            log.debug("terminal point within the causality margin; trying the next best")
    if phi_hat is None:
        raise EstimationError("every refined point lies on the causality boundary")
    z = residuals(phi_hat, x)
    out = FitResult(
        phi_hat=phi_hat,
        objective=float(obj(phi_hat.phi)),
        n=n,
        p=p,
        weight=w.name,
        seed=opts.seed,
        residuals=z,
        starts_used=len(order),
        converged=bool(res.success),
        start_objectives=d0,
        refined=refined,
    )
    if inference:
        attach_inference(out, x, w, opts.kernel)
    return out


def attach_inference(result: FitResult, x, w, kernel: str = "gaussian") -> FitResult:
    """Fill in the plug-in scale, covariance and 95% intervals of ``result``."""
    try:
        tau = estimate_tau(result.phi_hat, x, w, kernel=kernel)
    except AssumptionError as exc:
        log.warning("covariance unavailable: %s", exc)
        result.note = str(exc)
        return result
    result.s_hat, result.K_hat_z, result.L_hat_z = tau.s_hat, tau.K_hat_z, tau.L_hat_z
    result.tau_hat, result.bandwidth = tau.tau_hat, tau.bandwidth
    gamma = ar_autocovariance(result.phi_hat.phi, 1.0).matrix
    result.covariance = (tau.tau_hat ** 2 / result.n) * np.linalg.inv(gamma)
    half = Z_975 * np.sqrt(np.diag(result.covariance))
    result.ci = np.column_stack((result.phi_hat.phi - half, result.phi_hat.phi + half))
    return result
