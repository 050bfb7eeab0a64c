import numpy as np
import pytest
from scipy import integrate

from allpass.noise import Gaussian, Laplace, Logistic, StudentT
from allpass.scores import score_moments, weight_energy
from allpass.weights import ArctanWeight, VanDerWaerden, Wilcoxon
from tests.conftest import SHIPPED_NOISES

WEIGHTS = [Wilcoxon(), ArctanWeight(500.0), ArctanWeight(5.0), VanDerWaerden()]


def s_space_moments(w, noise):
    """Independent route: integrate directly over s in (0, 1) using the quantile."""
    pts = sorted({0.0, 1.0, *w.breakpoints(), 1e-6, 1 - 1e-6})
    K = sum(integrate.quad(lambda s: noise.quantile(s) * w.eval(s), a, b, limit=400,
                           epsrel=1e-11)[0] for a, b in zip(pts[:-1], pts[1:]))
    L = sum(integrate.quad(lambda s: noise.pdf(noise.quantile(s)) * w.deriv(s), a, b,
                           limit=400, epsrel=1e-11)[0] for a, b in zip(pts[:-1], pts[1:]))
    return K, L


def test_wilcoxon_energy():
    assert weight_energy(Wilcoxon()) == pytest.approx(1 / 12, rel=1e-12)


def test_wilcoxon_laplace_closed_form():
    m = score_moments(Wilcoxon(), Laplace(1.0))
    assert m.J == pytest.approx(1 / 12, rel=1e-10)
    assert m.L == pytest.approx(1 / (2 * np.sqrt(2)), rel=1e-9)


def test_gaussian_has_no_margin():
    m = score_moments(Wilcoxon(), Gaussian(1.0))
    assert abs(m.variance * m.L - m.K) < 1e-6
    assert not m.margin_positive


@pytest.mark.parametrize("w", [Wilcoxon(), ArctanWeight(500.0)], ids=lambda w: w.name)
@pytest.mark.parametrize("noise", [Laplace(), Logistic(), StudentT(3)], ids=repr)
def test_matches_s_space_quadrature(w, noise):
    m = score_moments(w, noise)
    K, L = s_space_moments(w, noise)
    assert m.K == pytest.approx(K, rel=1e-7)
    assert m.L == pytest.approx(L, rel=1e-7)


@pytest.mark.parametrize("w", WEIGHTS, ids=lambda w: w.name)
@pytest.mark.parametrize("noise", SHIPPED_NOISES, ids=repr)
def test_margin_and_cauchy_schwarz_for_shipped_pairs(w, noise):
    m = score_moments(w, noise)
    assert m.J > 0 and m.K > 0
    assert m.cauchy_schwarz_gap > 0
    assert m.score_margin > 0


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_behaviour(c):
    w = Wilcoxon()
    base = score_moments(w, StudentT(5, 1.0))
    scaled = score_moments(w, StudentT(5, c * c))
    assert scaled.J == pytest.approx(base.J)
    assert scaled.K == pytest.approx(c * base.K, rel=1e-8)
    assert scaled.L == pytest.approx(base.L / c, rel=1e-8)
