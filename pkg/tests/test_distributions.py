import math

import numpy as np
import pytest
from scipy import stats

from evtinfo.config import parse_spec_text
from evtinfo.distributions import (
    GumbelParams,
    SupportInterval,
    VonMises,
    VonMisesSpec,
    cdf_from_score,
    hazard,
    make_exponential,
    make_gnedenko,
    make_gumbel,
    make_von_mises,
    max_score,
    max_score_vonmises,
)
from evtinfo.errors import DivergenceError, DomainError

U_GRID = np.linspace(0.01, 0.99, 99)


def interior_grid(dist, k=50):
    return np.asarray(dist.quantile(np.linspace(0.02, 0.98, k)))


def gned_cdf(x):
    return 1 - math.exp(-x / (1 - x))


def gned_pdf(x):
    return math.exp(-x / (1 - x)) / (1 - x) ** 2


class TestConstruction:
    def test_gnedenko_cdf(self):
        assert make_gnedenko().cdf(0.5) == pytest.approx(1 - math.exp(-1), abs=1e-15)
        assert make_gnedenko().cdf(0.5) == pytest.approx(0.6321206, abs=1e-7)

    def test_gumbel_cdf(self):
        assert make_gumbel(GumbelParams(0, 1)).cdf(0.0) == pytest.approx(math.exp(-1), rel=1e-15)

    def test_exponential_median(self):
        assert make_exponential(1).quantile(0.5) == pytest.approx(math.log(2), rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_bad_parameters(self, bad):
        with pytest.raises(DomainError):
            make_exponential(bad)
        with pytest.raises(DomainError):
            GumbelParams(0.0, bad)

    def test_bad_support(self):
        with pytest.raises(DomainError):
            SupportInterval(1.0, 1.0)

    def test_gnedenko_quantile_form(self):
        g = make_gnedenko()
        for u in (0.1, 0.5, 0.9):
            s = -math.log(1 - u)
            assert g.quantile(u) == pytest.approx(s / (1 + s), rel=1e-14)

    def test_gumbel_quantile_form(self):
        g = make_gumbel(mu=0.3, beta=2.0)
        for u in (0.1, 0.5, 0.9):
            assert g.quantile(u) == pytest.approx(0.3 - 2.0 * math.log(-math.log(u)), rel=1e-14)

    def test_against_scipy(self):
        x = np.linspace(-2, 6, 33)
        g = make_gumbel(mu=0.5, beta=1.5)
        np.testing.assert_allclose(g.cdf(x), stats.gumbel_r(0.5, 1.5).cdf(x), rtol=1e-13)
        e = make_exponential(2.0)
        xp = x[x > 0]
        np.testing.assert_allclose(e.pdf(xp), stats.expon(scale=0.5).pdf(xp), rtol=1e-13)


class TestInvariants:
    def test_quantile_roundtrip(self, builtin):
        assert np.max(np.abs(builtin.cdf(builtin.quantile(U_GRID)) - U_GRID)) < 1e-10

    def test_cdf_monotone(self, builtin):
        x = builtin.quantile(np.linspace(0.001, 0.999, 400))
        assert np.all(np.diff(builtin.cdf(x)) >= 0)

    def test_pdf_is_cdf_derivative(self, builtin):
        x = interior_grid(builtin)
        h = 1e-5 * np.maximum(1.0, np.abs(x)) * (1 - x if builtin.name == "gnedenko" else 1)
        fd = (builtin.cdf(x + h) - builtin.cdf(x - h)) / (2 * h)
        np.testing.assert_allclose(builtin.pdf(x), fd, atol=1e-6, rtol=1e-6)

    def test_score_is_log_minus_w_prime(self, builtin):
        x = interior_grid(builtin)
        h = 1e-5 * (1 - x if builtin.name == "gnedenko" else np.ones_like(x))
        wprime = (builtin.w(x + h) - builtin.w(x - h)) / (2 * h)
        np.testing.assert_allclose(builtin.max_score(x), np.log(-wprime), atol=1e-6)

    def test_w_decreasing_to_zero(self, builtin):
        x = builtin.quantile(np.linspace(0.01, 1 - 1e-12, 200))
        w = builtin.w(x)
        assert np.all(np.diff(w) <= 0)
        assert w[-1] < 1e-11

    def test_hazard_matches_g(self):
        for d in (make_exponential(1.0), make_exponential(3.0), make_gnedenko()):
            x = interior_grid(d)
            np.testing.assert_allclose(d.hazard(x), 1.0 / d.von_mises.g(x), rtol=1e-10)

    def test_gnedenko_g_derivative_vanishes(self):
        spec = make_gnedenko().von_mises
        vals = [abs(spec.g_derivative(u)) for u in (0.9, 0.99, 0.999)]
        assert vals == pytest.approx([0.2, 0.02, 0.002], rel=1e-9)
        assert vals[0] > vals[1] > vals[2]


class TestMaxScore:
    def test_gumbel_zero(self, gumbel):
        assert max_score(gumbel, 0.0) == 0.0

    def test_gumbel_linear(self):
        g = make_gumbel(mu=1.0, beta=2.0)
        for y in (-1.0, 0.0, 3.0):
            assert g.max_score(y) == pytest.approx(-math.log(2.0) - (y - 1.0) / 2.0, rel=1e-14)

    def test_exponential_median(self, expo):
        assert max_score(expo, math.log(2)) == pytest.approx(0.0, abs=1e-15)

    def test_gnedenko(self, gned):
        direct = math.log(gned_pdf(0.5) / gned_cdf(0.5))
        assert max_score(gned, 0.5) == pytest.approx(direct, rel=1e-14)
        assert max_score(gned, 0.5) == pytest.approx(0.8449695, abs=1e-7)

    def test_domain_error_where_cdf_vanishes(self, expo, gumbel):
        with pytest.raises(DomainError):
            max_score(expo, 0.0)
        with pytest.raises(DomainError):
            max_score(gumbel, -50.0)  # F underflows

    def test_outside_support_rejected(self, gned):
        with pytest.raises(DomainError):
            gned.max_score(1.2)
        with pytest.raises(DomainError):
            gned.pdf(-0.1)
        assert gned.cdf(1.2) == 1.0 and gned.cdf(-0.3) == 0.0


class TestVonMisesScore:
    def test_exponential(self, expo):
        for x in (0.1, 1.0, 4.0):
            expected = -x - math.log(1 - math.exp(-x))
            assert max_score_vonmises(expo.von_mises, expo, x) == pytest.approx(expected, rel=1e-13)

    def test_matches_direct(self, gned, expo):
        for d in (gned, expo, make_exponential(2.5)):
            x = interior_grid(d)
            np.testing.assert_allclose(max_score_vonmises(d.von_mises, d, x), d.max_score(x),
                                       rtol=1e-10, atol=1e-10)
        assert max_score_vonmises(gned.von_mises, gned, 0.5) == pytest.approx(0.8449695, abs=1e-7)

    def test_median(self, builtin):
        m = builtin.quantile(0.5)
        assert max_score_vonmises(builtin.von_mises, builtin, m) == pytest.approx(
            -math.log(builtin.von_mises.g(m)), abs=1e-12)

    def test_tail_log_undefined(self, gned):
        with pytest.raises(DomainError):
            max_score_vonmises(gned.von_mises, gned, 1.0)


class TestHazard:
    def test_exponential_constant(self):
        e = make_exponential(2.0)
        np.testing.assert_allclose(hazard(e, np.array([0.1, 1.0, 7.0])), 2.0, rtol=1e-13)

    def test_gnedenko(self, gned):
        assert hazard(gned, 0.5) == pytest.approx(4.0, rel=1e-13)

    def test_gumbel(self, gumbel):
        direct = math.exp(-1) / (1 - math.exp(-1))
        assert hazard(gumbel, 0.0) == pytest.approx(direct, rel=1e-14)
        assert hazard(gumbel, 0.0) == pytest.approx(0.5819767, abs=1e-7)


class TestCdfFromScore:
    def test_linear_score(self):
        assert cdf_from_score(lambda u: -u, 0.0) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_exponential_roundtrip(self, expo):
        for x in np.linspace(0.1, 5, 12):
            assert cdf_from_score(expo.max_score, float(x)) == pytest.approx(float(expo.cdf(x)), abs=1e-6)

    @pytest.mark.parametrize("mu, beta", [(0.0, 1.0), (1.5, 0.5), (-2.0, 3.0)])
    def test_characterizes_gumbel(self, mu, beta):
        g = make_gumbel(mu=mu, beta=beta)
        theta = lambda u: -math.log(beta) - (u - mu) / beta
        for x in np.linspace(mu - beta, mu + 4 * beta, 15):
            assert cdf_from_score(theta, float(x)) == pytest.approx(float(g.cdf(x)), abs=1e-8)

    def test_bounded_support(self, gned):
        for x in (0.2, 0.5, 0.8):
            assert cdf_from_score(gned.max_score, x, upper=1.0) == pytest.approx(gned_cdf(x), abs=1e-9)

    def test_divergent(self):
        with pytest.raises(DivergenceError):
            cdf_from_score(lambda u: np.zeros_like(u), 0.0, tail_budget=100)


class TestGenericVonMises:
    def test_exponential_via_quadrature_G(self):
        spec = VonMisesSpec(c=1.0, z0=0.0, x0=math.inf, g=lambda u: np.full_like(np.asarray(u, float), 0.5))
        d = make_von_mises(spec)
        ref = make_exponential(2.0)
        x = np.linspace(0.05, 4, 9)
        np.testing.assert_allclose(d.cdf(x), ref.cdf(x), rtol=1e-12)
        np.testing.assert_allclose(d.max_score(x), ref.max_score(x), rtol=1e-10)
        assert d.quantile(0.5) == pytest.approx(math.log(2) / 2, rel=1e-12)

    def test_gnedenko_from_config(self, gned):
        spec, lower = parse_spec_text("c = 1\nz0 = 0\nx0 = 1\ng_expr = (1 - u)**2\n")
        d = VonMises(spec, lower)
        x = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(d.cdf(x), gned.cdf(x), rtol=1e-11)
        np.testing.assert_allclose(d.hazard(x), gned.hazard(x), rtol=1e-10)
        for u in (0.2, 0.7):
            assert d.quantile(u) == pytest.approx(gned.quantile(u), rel=1e-11)

    def test_c_not_one_moves_lower_edge(self):
        # F = 1 - 2 exp(-x) on (log 2, inf): an exponential shifted by log 2
        spec = VonMisesSpec(c=2.0, z0=0.0, x0=math.inf, g=lambda u: np.ones_like(np.asarray(u, float)),
                            big_g=lambda x: np.asarray(x, float))
        d = make_von_mises(spec)
        assert d.support.lower == pytest.approx(math.log(2), rel=1e-12)
        assert d.cdf(1.0) == pytest.approx(1 - 2 * math.exp(-1), rel=1e-14)

    def test_invalid_spec_rejected(self):
        with pytest.raises(DomainError):
            VonMisesSpec(c=0.0, z0=0.0, x0=1.0, g=lambda u: u)
        with pytest.raises(DomainError):
            make_von_mises(VonMisesSpec(c=1.0, z0=0.0, x0=1.0, g=lambda u: np.asarray(u) - 0.5))
