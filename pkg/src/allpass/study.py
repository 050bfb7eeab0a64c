"""Monte Carlo studies: estimator accuracy/coverage and order-selection frequencies.

Replicate ``i`` simulates with stream ``(seed, i, 0)`` and fits with a seed
drawn from stream ``(seed, i, 1)``, so results do not depend on how
replicates are scheduled. ``ALLPASS_THREADS`` caps the number of worker
processes (default: CPU count).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from allpass.asymptotics import asymptotic_sd, scalar_multiple_R
from allpass.errors import AllPassError
from allpass.estimation import FitOptions, fit
from allpass.order import select_order
from allpass.residuals import AllPassParams
from allpass.simulate import replicate_seed, simulate_allpass


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("ALLPASS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map(func, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _fit_seed(seed, i):
    return int(replicate_seed(seed, i, 1).generate_state(1)[0])


def _estimation_task(task):
    i, phi0, noise, weight, n, seed, opts = task
    sim = simulate_allpass(phi0, noise, n, seed=replicate_seed(seed, i, 0))
    try:
        res = fit(sim.x, len(phi0), weight, opts.with_seed(_fit_seed(seed, i)))
    except AllPassError as exc:
        return i, None, None, str(exc)
    return i, res.phi_hat.phi.copy(), None if res.ci is None else res.ci.copy(), res.note


def _order_task(task):
    i, phi0, noise, weight, n, P, seed, opts = task
    sim = simulate_allpass(phi0, noise, n, seed=replicate_seed(seed, i, 0))
    rep = select_order(sim.x, P, weight, opts.with_seed(_fit_seed(seed, i)))
    return i, rep.selected_r, [r.coefficient for r in rep.records], rep.tau_hat


@dataclass
class EstimationStudy:
    phi0: np.ndarray
    n: int
    weight: str
    noise: str
    replicates: int
    estimates: np.ndarray  # (replicates, p), NaN rows for failed fits
    covered: np.ndarray  # (replicates, p) booleans; False where no interval
    has_ci: np.ndarray  # (replicates,)
    asymptotic_sd: np.ndarray | None
    failures: int

    @property
    def mean(self):
        return np.nanmean(self.estimates, axis=0)

    @property
    def sd(self):
        return np.nanstd(self.estimates, axis=0, ddof=1)

    @property
    def coverage(self):
        """Percent of replicates (with an interval) whose 95% interval covers the truth."""
        k = max(int(self.has_ci.sum()), 1)
        return 100.0 * self.covered[self.has_ci].sum(axis=0) / k

    def rows(self):
        asd = self.asymptotic_sd
        for j, true in enumerate(self.phi0):
            yield {
                "n": self.n,
                "coefficient": f"phi{j + 1}",
                "true": float(true),
                "asymptotic_sd": None if asd is None else float(asd[j]),
                "mean": float(self.mean[j]),
                "sd": float(self.sd[j]),
                "coverage_pct": float(self.coverage[j]),
                "weight": self.weight,
                "noise": self.noise,
                "replicates": self.replicates,
                "failures": self.failures,
            }


@dataclass
class OrderStudy:
    phi0: np.ndarray
    n: int
    P: int
    weight: str
    noise: str
    selected: list  # per replicate, None when undetermined
    coefficients: list
    tau_hats: list

    @property
    def frequencies(self) -> dict:
        out = {r: 0 for r in range(self.P + 1)}
        out["undetermined"] = 0
        for r in self.selected:
            out["undetermined" if r is None else r] += 1
        return out


def estimation_study(phi0, noise, weight, n: int, replicates: int = 200, seed=0,
                     opts: FitOptions | None = None, workers: int | None = None) -> EstimationStudy:
    """Simulate, fit and summarize bias, spread and 95% interval coverage."""
    opts = FitOptions() if opts is None else opts
    phi0 = AllPassParams(phi0).phi
    tasks = [(i, phi0, noise, weight, n, seed, opts) for i in range(replicates)]
    out = _map(_estimation_task, tasks, worker_count(workers))
    p = phi0.size
    est = np.full((replicates, p), np.nan)
    covered = np.zeros((replicates, p), dtype=bool)
    has_ci = np.zeros(replicates, dtype=bool)
    failures = 0
    for i, phi_hat, ci, _ in out:
        if phi_hat is None:
            failures += 1
            continue
        est[i] = phi_hat
        if ci is not None:
            has_ci[i] = True
            covered[i] = (ci[:, 0] <= phi0) & (phi0 <= ci[:, 1])
    try:
        asd = asymptotic_sd(phi0, scalar_multiple_R(weight, noise), n)
    except AllPassError:
        asd = None
    return EstimationStudy(phi0=phi0, n=n, weight=weight.name, noise=noise.name,
                           replicates=replicates, estimates=est, covered=covered,
                           has_ci=has_ci, asymptotic_sd=asd, failures=failures)


def order_study(phi0, noise, weight, n: int, P: int = 5, replicates: int = 100, seed=0,
                opts: FitOptions | None = None, workers: int | None = None) -> OrderStudy:
    """Frequencies of the selected all-pass order over simulated replicates."""
    opts = FitOptions() if opts is None else opts
    phi0 = AllPassParams(phi0).phi
    tasks = [(i, phi0, noise, weight, n, P, seed, opts) for i in range(replicates)]
    out = _map(_order_task, tasks, worker_count(workers))
    return OrderStudy(phi0=phi0, n=n, P=P, weight=weight.name, noise=noise.name,
                      selected=[o[1] for o in out], coefficients=[o[2] for o in out],
                      tau_hats=[o[3] for o in out])
