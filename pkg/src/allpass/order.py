"""All-pass order selection from the significance of the last fitted coefficient.

Models of order 1..P are fitted independently. With ``tau`` estimated from
the order-P fit, the selected order is the smallest ``r`` in 0..P such that
``|phi_hat_{j,j}| < 1.96 tau / sqrt(n)`` for every ``j > r``, where
``phi_hat_{j,j}`` is the last coefficient of the order-``j`` fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from allpass.errors import AllPassError, DomainError
from allpass.estimation import Z_975, FitOptions, FitResult, fit


@dataclass
class OrderRecord:
    p: int
    coefficient: float | None
    threshold: float | None = None
    significant: bool | None = None
    fit: FitResult | None = field(default=None, repr=False)
    error: str = ""

    @property
    def available(self) -> bool:
        return self.coefficient is not None


@dataclass
class OrderReport:
    P: int
    n: int
    records: list
    tau_hat: float | None
    selected_r: int | None
    note: str = ""

    @property
    def threshold(self) -> float | None:
        if self.tau_hat is None:
            return None
        return Z_975 * self.tau_hat / np.sqrt(self.n)

    @property
    def at_boundary(self) -> bool:
        """The order-P coefficient is itself significant; a larger P may be needed."""
        return self.selected_r is not None and self.selected_r == self.P

    def fit_for(self, p: int) -> FitResult | None:
        return self.records[p - 1].fit


def order_seed(seed, p: int) -> int:
    """Per-order seed so the fits for different orders use unrelated starts."""
    return int(np.random.SeedSequence(seed, spawn_key=(int(p),)).generate_state(1)[0])


def apply_rule(coefficients, threshold: float) -> int:
    """Smallest ``r`` with ``|c_j| < threshold`` for all ``j > r`` (``coefficients[j-1] = c_j``)."""
    r = 0
    for j, c in enumerate(coefficients, start=1):
        if abs(c) >= threshold:
            r = j
    return r


def select_order(x, P: int, w=None, opts: FitOptions | None = None) -> OrderReport:
    """Fit orders 1..P and choose the all-pass order."""
    opts = FitOptions() if opts is None else opts
    x = np.asarray(x, dtype=float)
    n = x.size
    if P < 1:
        raise DomainError("P must be at least 1")
    if n <= 4 * P:
        raise DomainError(f"need n > 4P observations, got n={n}, P={P}")

    records = []
    previous = None
    for p in range(1, P + 1):
        # the previous order's estimate, padded with a zero, is a feasible order-p point
        warm = None if previous is None else np.append(previous, 0.0)[None, :]
        try:
            res = fit(x, p, w, opts.with_seed(order_seed(opts.seed, p)), inference=(p == P),
                      extra_starts=warm)
        except AllPassError as exc:
            records.append(OrderRecord(p=p, coefficient=None, error=str(exc)))
            previous = None
            continue
        records.append(OrderRecord(p=p, coefficient=float(res.phi_hat.phi[-1]), fit=res))
        previous = res.phi_hat.phi

    failed = [r.p for r in records if not r.available]
    if failed:
        return OrderReport(P=P, n=n, records=records, tau_hat=None, selected_r=None,
                           note=f"fit failed at order(s) {failed}; selection aborted")
    top = records[-1].fit
    if top.tau_hat is None:
        return OrderReport(P=P, n=n, records=records, tau_hat=None, selected_r=None,
                           note=f"tau unavailable from the order-{P} fit: {top.note}")

    report = OrderReport(P=P, n=n, records=records, tau_hat=top.tau_hat, selected_r=None)
    thr = report.threshold
    for rec in records:
        rec.threshold = thr
        rec.significant = abs(rec.coefficient) >= thr
    report.selected_r = apply_rule([r.coefficient for r in records], thr)
    if report.at_boundary:
        report.note = "order-P coefficient is significant; consider increasing P"
    return report
