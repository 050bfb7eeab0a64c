import numpy as np
import pytest

from allpass.estimation import FitOptions
from allpass.noise import Laplace
from allpass.study import estimation_study, order_study, worker_count
from allpass.weights import Wilcoxon

QUICK = FitOptions(n_starts=60, n_refine=2)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("ALLPASS_THREADS", "3")
    assert worker_count() == 3
    assert worker_count(1) == 1


def test_estimation_study_summary():
    st = estimation_study([0.5], Laplace(), Wilcoxon(), 300, replicates=6, seed=2, opts=QUICK,
                          workers=1)
    assert st.estimates.shape == (6, 1)
    assert st.mean[0] == pytest.approx(np.nanmean(st.estimates[:, 0]))
    assert st.sd[0] == pytest.approx(np.nanstd(st.estimates[:, 0], ddof=1))
    assert 0 <= st.coverage[0] <= 100
    assert st.asymptotic_sd[0] == pytest.approx(np.sqrt(5 / 6 * 0.75 / 300), rel=1e-6)
    assert len(list(st.rows())) == 1


def test_study_reproducible_and_worker_independent():
    a = estimation_study([0.5], Laplace(), Wilcoxon(), 200, replicates=3, seed=5, opts=QUICK,
                         workers=1)
    b = estimation_study([0.5], Laplace(), Wilcoxon(), 200, replicates=3, seed=5, opts=QUICK,
                         workers=2)
    np.testing.assert_array_equal(a.estimates, b.estimates)


def test_order_study_frequencies():
    st = order_study([0.5], Laplace(), Wilcoxon(), 400, P=2, replicates=3, seed=1, opts=QUICK,
                     workers=1)
    freq = st.frequencies
    assert set(freq) == {0, 1, 2, "undetermined"}
    assert sum(freq.values()) == 3
