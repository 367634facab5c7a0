import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ftrfade.channel import FtrParams, InvalidParameter, ftr_cdf, ftr_pdf
from ftrfade.composite import (
    CompositeParams,
    OutageQuery,
    ShadowParams,
    amplitude_cdf,
    amplitude_pdf,
    composite_cdf,
    composite_pdf,
    log_composite_pdf,
    outage_asymptotic,
    outage_exact,
)
from ftrfade.quadrature import integrate_finite, integrate_semi_infinite


def mixture_pdf(z, c):
    """Density of Z_bar*G*V by integrating the FTR density against the shadowing law."""
    lam, zb = c.shadow.lam, c.mean_power
    beta = lam - 1.0

    def integrand(g):
        ig = np.exp(lam * math.log(beta) - (lam + 1) * np.log(g) - beta / g - math.lgamma(lam))
        return ig * ftr_pdf(z / (zb * g), c.fading) / (zb * g)

    return integrate_semi_infinite(integrand, 0.0)


class TestParameters:
    def test_lambda_must_exceed_one(self):
        with pytest.raises(InvalidParameter, match="lambda"):
            ShadowParams(1.0)

    def test_fading_must_be_unit_mean(self):
        with pytest.raises(InvalidParameter):
            CompositeParams(1.0, FtrParams(2.0, 1.0, 1.0, 0.1), ShadowParams(2.0))

    def test_outage_query(self):
        assert OutageQuery(2.0, 8.0).ratio == 0.25
        with pytest.raises(InvalidParameter):
            OutageQuery(0.0, 1.0)

    def test_integer_flag(self):
        assert ShadowParams(3.0).is_integer
        assert not ShadowParams(2.5).is_integer


class TestDensity:
    @pytest.mark.parametrize("lam, z_bar", [(2.0, 1.0), (3.5, 5.0), (50.0, 1.0)])
    def test_against_mixture_integral(self, lam, z_bar):
        c = CompositeParams.from_values(z_bar, 2.0, 4.0, 0.2, lam)
        for z in (0.1 * z_bar, z_bar, 4.0 * z_bar):
            assert_allclose(composite_pdf(z, c), mixture_pdf(z, c), rtol=1e-9)

    @pytest.mark.parametrize("lam", [1.5, 2.0, 5.0, 20.0])
    def test_normalization_and_mean(self, lam):
        c = CompositeParams.from_values(2.0, 1.5, 6.0, 0.5, lam)
        pdf = lambda z: composite_pdf(z, c)
        assert_allclose(integrate_semi_infinite(pdf, 0.0, scale=2.0), 1.0, rtol=1e-9)
        if lam >= 2.0:
            mean = integrate_semi_infinite(lambda z: z * pdf(z), 0.0, scale=2.0)
            assert_allclose(mean, 2.0, rtol=1e-7)

    def test_large_lambda_tends_to_ftr(self):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, 2000.0)
        z = np.array([0.3, 1.0, 2.5])
        assert_allclose(composite_pdf(z, c), ftr_pdf(z, c.fading), rtol=5e-3)

    def test_log_form_is_finite_deep_in_the_tail(self):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, 5.0)
        assert np.isfinite(log_composite_pdf(1e-8, c))
        assert np.isfinite(log_composite_pdf(1e8, c))

    def test_rejects_nonpositive_abscissa(self):
        c = CompositeParams.from_values()
        with pytest.raises(ValueError):
            composite_pdf(0.0, c)

    def test_amplitude_density(self):
        c = CompositeParams.from_values(5.0, 2.0, 4.0, 0.2, 2.0)
        total = integrate_semi_infinite(lambda r: amplitude_pdf(r, c), 0.0, scale=2.0)
        assert_allclose(total, 1.0, rtol=1e-9)
        r = np.array([0.5, 2.0])
        assert_allclose(amplitude_cdf(r, c), composite_cdf(r * r, c), rtol=1e-15)


class TestCdf:
    @pytest.mark.parametrize("lam", [2, 3, 5])
    def test_closed_vs_quadrature(self, lam):
        c = CompositeParams.from_values(1.0, 2.5, 8.0, 0.7, lam)
        z = np.geomspace(1e-3, 100.0, 25)
        assert_allclose(composite_cdf(z, c, "closed"), composite_cdf(z, c, "quadrature"), atol=1e-10)

    def test_non_integer_lambda_uses_quadrature(self):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, 2.5)
        with pytest.raises(InvalidParameter):
            composite_cdf(1.0, c, "closed")
        val = composite_cdf(1.0, c)
        assert_allclose(val, integrate_finite(lambda z: composite_pdf(z, c), 1e-300, 1.0), rtol=1e-10)

    def test_monotone_and_bounded(self):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, 2.0)
        F = composite_cdf(np.geomspace(1e-6, 1e6, 200), c)
        assert np.all(np.diff(F) >= 0)
        assert F[0] < 1e-5 and F[-1] > 1 - 1e-5 and F[-1] <= 1.0

    def test_rayleigh_fading_closed_form(self):
        # K = 0, lam = 2: F(z) = 1 - (1 + z/Z)^(-2) ... with the unit-mean shadow scale
        c = CompositeParams.from_values(1.0, 1.0, 0.0, 0.0, 2.0)
        z = np.array([0.1, 1.0, 10.0])
        assert_allclose(composite_cdf(z, c), 1.0 - (1.0 + z) ** -2, rtol=1e-13)

    def test_scalar_return(self):
        assert isinstance(composite_cdf(0.5, CompositeParams.from_values()), float)


class TestOutage:
    def test_exact_is_cdf(self):
        c = CompositeParams.from_values(3.0, 2.0, 4.0, 0.3, 2.0)
        q = OutageQuery(0.5, 2.0)
        assert outage_exact(q, c) == composite_cdf(0.75, c)

    @pytest.mark.parametrize("m, K", [(2.0, 4.0), (10.0, 15.0), (0.8, 1.0)])
    def test_asymptote_ratio(self, m, K):
        c = CompositeParams.from_values(1.0, m, K, 0.3, 2.0)
        q = OutageQuery(1e-7, 1.0)
        assert_allclose(outage_exact(q, c) / outage_asymptotic(q, c), 1.0, rtol=1e-3)

    def test_asymptote_coefficient_is_lam_over_lam_minus_one_times_ftr_slope(self):
        # F_V(x) ~ f_V(0) x and E[G^-1] = lam / (lam - 1) for unit-mean shadowing
        c = CompositeParams.from_values(1.0, 1.5, 6.0, 0.8, 3.0)
        slope = outage_asymptotic(OutageQuery(1.0, 1.0), c)
        assert_allclose(slope, 1.5 * ftr_pdf(0.0, c.fading), rtol=1e-12)

    def test_ftr_cdf_slope_at_origin(self):
        p = FtrParams(1.0, 2.0, 4.0, 0.2)
        assert_allclose(ftr_cdf(1e-8, p) / 1e-8, ftr_pdf(0.0, p), rtol=1e-6)

    def test_outage_tends_to_one(self):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.3, 2.0)
        assert outage_exact(OutageQuery(1e6, 1.0), c) > 1 - 1e-5
