import numpy as np
import pytest

from allpass.errors import DomainError
from allpass.estimation import FitOptions
from allpass.noise import Gaussian, Laplace, StudentT
from allpass.pipeline import deconv_identify, diagnose, prefit_ar, sample_acf, sample_acov
from allpass.simulate import simulate_allpass, simulate_ar, simulate_ma, wavelet_from_roots
from tests.oracles import yule_walker_autocovariance

# mixed-phase wavelet: two roots inside the unit circle, one outside
WAVELET = wavelet_from_roots([0.7, 0.8, -2.5])


def test_acf_by_hand():
    x = np.array([1.0, 3.0, 2.0, 5.0])
    d = x - x.mean()
    expected = [np.sum(d[:-h] * d[h:]) / np.sum(d * d) for h in (1, 2)]
    np.testing.assert_allclose(sample_acf(x, 2), expected)
    np.testing.assert_allclose(sample_acov(x, 1)[0], np.mean(d * d))


def test_acf_errors():
    with pytest.raises(DomainError):
        sample_acf(np.ones(10), 2)
    with pytest.raises(DomainError):
        sample_acf(np.arange(3.0), 3)


def test_acf_of_ar_process():
    x = simulate_ar([0.6, -0.2], Gaussian(), 50_000, seed=1).x
    gamma = yule_walker_autocovariance([0.6, -0.2], 1.0, 6)
    np.testing.assert_allclose(sample_acf(x, 5), gamma[1:] / gamma[0], atol=0.02)


def test_prefit_recovers_ar():
    x = simulate_ar([0.6, -0.2], Laplace(), 20_000, seed=2).x + 4.0
    phi, w = prefit_ar(x, 2)
    np.testing.assert_allclose(phi, [0.6, -0.2], atol=0.03)
    assert w.size == x.size - 2
    assert np.var(w) == pytest.approx(1.0, rel=0.05)


def test_diagnose_iid():
    w = StudentT(5).sample(5000, np.random.default_rng(3))
    d = diagnose(w, 20)
    assert d.bound == pytest.approx(1.96 / np.sqrt(5000))
    assert all(v <= 4 for v in d.exceedances.values())
    rows = list(d.rows())
    assert len(rows) == 20 and rows[0][0] == 1


def test_diagnose_all_pass_dependence():
    x = simulate_allpass([0.5], Laplace(), 5000, seed=4).x
    d = diagnose(x, 10)
    assert d.exceedances["w"] <= 2
    assert d.exceedances["w2"] >= 2


def test_prefit_residuals_are_white_but_dependent():
    x = simulate_ma(WAVELET, StudentT(5), 5000, seed=101).x
    _, w = prefit_ar(x, 40)
    d = diagnose(w, 20)
    assert d.exceedances["w"] <= 3
    assert d.exceedances["w2"] + d.exceedances["absw"] >= 4


def test_deconv_single_replicate():
    x = simulate_ma(WAVELET, StudentT(5), 5000, seed=101).x
    _, w = prefit_ar(x, 40)
    res = deconv_identify(w, 3, opts=FitOptions(seed=1))
    assert res.order.selected_r == 2
    np.testing.assert_allclose(res.fit.phi_hat.phi, [1.5, -0.56], atol=0.1)
    assert res.fit.ci is not None
    ex = res.diagnostics.exceedances
    assert ex["w2"] <= 2 and ex["absw"] <= 2
    assert res.input_diagnostics.exceedances["w2"] > ex["w2"]


def test_deconv_iid_selects_nothing():
    w = StudentT(5).sample(2000, np.random.default_rng(8))
    res = deconv_identify(w, 2, opts=FitOptions(seed=0))
    if res.order.selected_r == 0:
        assert res.fit is None
        np.testing.assert_allclose(res.diagnostics.acf_w, res.input_diagnostics.acf_w)
