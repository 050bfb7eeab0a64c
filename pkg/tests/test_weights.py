import numpy as np
import pytest
from scipy.special import ndtri

from allpass.errors import DomainError
from allpass.noise import Gaussian, Laplace, Logistic, StudentT
from allpass.weights import (
    ArctanWeight,
    VanDerWaerden,
    Wilcoxon,
    get_weight,
    make_arctan_weight,
    make_optimal_weight,
    weight_eval,
)

GRID = np.arange(1, 1000) / 1000.0
SHIPPED = [Wilcoxon(), ArctanWeight(1.0), ArctanWeight(500.0), VanDerWaerden()]


def test_wilcoxon_values():
    w = Wilcoxon()
    assert weight_eval(w, 0.5) == 0.0
    assert weight_eval(w, 0.25) == -0.25


def test_arctan_values():
    w = make_arctan_weight(500)
    assert weight_eval(w, 0.5) == 0.0
    assert weight_eval(w, 0.999) == pytest.approx(2 / np.pi * np.arctan(500 * 0.499), rel=1e-14)
    assert make_arctan_weight(1).deriv(0.5) == pytest.approx(2 / np.pi, rel=1e-14)


def test_arctan_tends_to_sign():
    vals = [make_arctan_weight(m).eval(0.75) for m in (1e2, 1e4, 1e6, 1e8)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.1, 1.5])
def test_domain_error(s):
    with pytest.raises(DomainError):
        weight_eval(Wilcoxon(), s)


@pytest.mark.parametrize("m", [0.0, -1.0])
def test_arctan_rejects_nonpositive_m(m):
    with pytest.raises(DomainError):
        make_arctan_weight(m)


@pytest.mark.parametrize("w", SHIPPED, ids=lambda w: w.name)
class TestShippedWeightProperties:
    def test_strictly_increasing(self, w):
        assert np.all(np.diff(w.eval(GRID)) > 0)

    def test_odd_about_half(self, w):
        np.testing.assert_allclose(w.eval(GRID), -w.eval(1 - GRID), atol=1e-12)

    def test_derivative_matches_central_difference(self, w):
        h = 1e-6 if w.name != "arctan-500" else 1e-7
        fd = (w.eval(GRID + h) - w.eval(GRID - h)) / (2 * h)
        # relative for steep weights whose derivative reaches ~300
        scale = np.maximum(1.0, np.abs(w.deriv(GRID)))
        assert np.max(np.abs(w.deriv(GRID) - fd) / scale) < 1e-6


def test_vdw_matches_normal_quantile_inside_clip():
    w = VanDerWaerden()
    s = np.linspace(1e-3, 1 - 1e-3, 101)
    np.testing.assert_allclose(w.eval(s), ndtri(s), rtol=1e-13)
    assert np.isfinite(w.eval(1e-300))


def test_optimal_weight_logistic_is_wilcoxon():
    lam = make_optimal_weight(Logistic(2.0))
    s = GRID[GRID != 0.5]
    ratio = lam.eval(s) / (s - 0.5)
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)
    assert lam.eval(0.75) == pytest.approx(1.0)


def test_optimal_weight_gaussian_is_normal_scores():
    lam = make_optimal_weight(Gaussian(3.0))
    s = GRID[GRID != 0.5]
    ratio = lam.eval(s) / ndtri(s)
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)


@pytest.mark.parametrize("noise", [Logistic(), StudentT(5), Gaussian()], ids=repr)
def test_optimal_weight_zero_at_half_for_symmetric_noise(noise):
    assert make_optimal_weight(noise).eval(0.5) == pytest.approx(0.0, abs=1e-12)


def test_optimal_weight_derivative(rng):
    lam = make_optimal_weight(StudentT(4))
    h = 1e-6
    fd = (lam.eval(GRID + h) - lam.eval(GRID - h)) / (2 * h)
    np.testing.assert_allclose(lam.deriv(GRID), fd, rtol=1e-5, atol=1e-6)


def test_optimal_weight_refuses_laplace():
    with pytest.raises(DomainError):
        make_optimal_weight(Laplace())


def test_get_weight_names():
    assert isinstance(get_weight("wilcoxon"), Wilcoxon)
    assert get_weight("lad-like").m == 500
    assert get_weight("arctan-20").m == 20
    with pytest.raises(DomainError):
        get_weight("huber")
