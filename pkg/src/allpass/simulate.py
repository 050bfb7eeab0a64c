"""Simulation of causal all-pass, AR and MA series.

The all-pass generator uses the order-``r`` form

    x_t - phi_1 x_{t-1} - ... - phi_r x_{t-r}
        = e_t + (phi_{r-1}/phi_r) e_{t-1} + ... + (phi_1/phi_r) e_{t-r+1} - e_{t-r}/phi_r

with i.i.d. noise ``e_t``, started from zeros and run through a burn-in.
The noise for the kept window is retained so tests can compare residuals
against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from allpass.errors import DomainError
from allpass.residuals import AllPassParams


@dataclass(frozen=True)
class SimulatedSeries:
    x: np.ndarray
    noise: np.ndarray  # noise[i] drives x[i]
    phi0: AllPassParams
    noise_model: object
    burnin: int
    seed: object


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def replicate_seed(master, index: int, stream: int = 0) -> np.random.SeedSequence:
    """Independent stream for replicate ``index`` of a study seeded by ``master``."""
    return np.random.SeedSequence(master, spawn_key=(int(index), int(stream)))


def default_burnin(p: int) -> int:
    return 500 + 50 * p


def _drive(noise, n, burnin, seed):
    if n < 1:
        raise DomainError("n must be positive")
    if burnin is None:
        burnin = 0
    if burnin < 0:
        raise DomainError("burn-in must be nonnegative")
    e = noise.sample(n + burnin, make_rng(seed))
    return e, burnin


def allpass_ma_coefficients(phi) -> np.ndarray:
    """MA polynomial ``B^r phi(B^{-1}) / (-phi_r)`` as coefficients of ``B^0..B^r``."""
    params = phi if isinstance(phi, AllPassParams) else AllPassParams(phi)
    r = params.r
    if r == 0:
        raise DomainError("all coefficients are zero: the all-pass model is degenerate")
    head = params.phi[:r]
    return np.concatenate(([1.0], head[r - 2::-1] / head[r - 1] if r > 1 else [], [-1.0 / head[r - 1]]))


def simulate_allpass(phi0, noise, n: int, seed=None, burnin: int | None = None) -> SimulatedSeries:
    """Draw ``n`` observations of the causal all-pass model with coefficients ``phi0``."""
    params = phi0 if isinstance(phi0, AllPassParams) else AllPassParams(phi0)
    ma = allpass_ma_coefficients(params)
    r = params.r
    ar = np.concatenate(([1.0], -params.phi[:r]))
    if burnin is None:
        burnin = default_burnin(params.p)
    e, burnin = _drive(noise, n, burnin, seed)
    x = lfilter(ma, ar, e)[burnin:]
    return SimulatedSeries(x=x, noise=e[burnin:], phi0=params, noise_model=noise,
                           burnin=burnin, seed=seed)


def simulate_ar(phi, noise, n: int, seed=None, burnin: int | None = None) -> SimulatedSeries:
    """Causal AR(p) series ``phi(B) x_t = e_t``."""
    params = phi if isinstance(phi, AllPassParams) else AllPassParams(phi)
    if burnin is None:
        burnin = default_burnin(params.p)
    e, burnin = _drive(noise, n, burnin, seed)
    x = lfilter([1.0], np.concatenate(([1.0], -params.phi)), e)[burnin:]
    return SimulatedSeries(x=x, noise=e[burnin:], phi0=params, noise_model=noise,
                           burnin=burnin, seed=seed)


def wavelet_from_roots(roots) -> np.ndarray:
    """Real MA coefficients ``beta_0 = 1, beta_1, ...`` of ``prod (1 - z / root)``.

    Complex roots must come in conjugate pairs.
    """
    coeffs = np.array([1.0 + 0j])
    for rt in roots:
        coeffs = np.convolve(coeffs, [1.0, -1.0 / rt])
    if np.max(np.abs(coeffs.imag)) > 1e-10:
        raise DomainError("complex roots must appear in conjugate pairs")
    return coeffs.real


def simulate_ma(beta, noise, n: int, seed=None) -> SimulatedSeries:
    """Moving average ``x_t = sum_k beta_k e_{t-k}`` (no invertibility requirement)."""
    beta = np.asarray(beta, dtype=float)
    q = beta.size - 1
    e, _ = _drive(noise, n, q, seed)
    x = np.convolve(e, beta, mode="full")[q:q + n]
    return SimulatedSeries(x=x, noise=e[q:], phi0=None, noise_model=noise, burnin=q, seed=seed)
