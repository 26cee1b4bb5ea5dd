"""MacDonald functions, GIG/IG/RIG densities, transforms, CDFs, samplers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import kv
from scipy.stats import gamma as gamma_dist
from scipy.stats import kstest

from mrig import (
    GigParams,
    ModelError,
    bessel_k,
    gig_log_density,
    ig_cdf,
    ig_laplace,
    log_bessel_k,
    rig_cdf,
    rig_laplace,
    rig_moments,
    sample_gamma_half,
    sample_ig,
    sample_rig,
)
from mrig.univariate import ig_mean_shape

# ---------------------------------------------------------------------------
# MacDonald function


def k_defining(q, z):
    """K_q(z) = int_0^inf exp(-z cosh t) cosh(q t) dt, evaluated in log space."""

    def f(t):
        if t > 700.0:
            return 0.0
        return np.exp(np.logaddexp(q * t, -q * t) - np.log(2.0) - z * np.cosh(t))

    val, _ = quad(f, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12)
    return val


def test_bessel_half_integer_closed_forms():
    for z in (0.2, 1.0, 3.7, 10.0):
        assert abs(bessel_k(0.5, z) - np.sqrt(np.pi / (2 * z)) * np.exp(-z)) < 1e-15
        k32 = np.sqrt(np.pi / (2 * z)) * np.exp(-z) * (1.0 + 1.0 / z)
        assert abs(bessel_k(1.5, z) - k32) < 1e-14 * k32


def test_bessel_matches_defining_integral():
    for q in (0.5, 1.0, 1.5, 2.5, 0.25, 3.0):
        for z in (0.5, 1.0, 2.0):
            ref = k_defining(q, z)
            assert abs(bessel_k(q, z) - ref) <= 1e-10 * ref


def test_bessel_matches_scipy_general_order():
    for q in (0.3, 1.2, 2.7):
        for z in (0.4, 1.5, 6.0):
            assert abs(bessel_k(q, z) - kv(q, z)) < 1e-13 * kv(q, z)


def test_bessel_symmetric_in_order():
    for q in (0.5, 1.5, 2.5):
        for z in (0.7, 2.0):
            assert bessel_k(-q, z) == pytest.approx(bessel_k(q, z), rel=1e-14)


def test_log_bessel_moderate_and_extreme():
    for q in (0.5, 1.5, 2.5, 1.2):
        for z in (0.5, 2.0, 20.0):
            assert log_bessel_k(q, z) == pytest.approx(
                np.log(bessel_k(q, z)), rel=1e-12
            )
    # K underflows around z ~ 745; the log form must stay finite
    lb = log_bessel_k(0.5, 2000.0)
    assert np.isfinite(lb)
    assert lb == pytest.approx(0.5 * np.log(np.pi / 4000.0) - 2000.0, rel=1e-14)


@settings(max_examples=80, deadline=None)
@given(
    st.floats(min_value=0.5, max_value=5.0),
    st.floats(min_value=0.1, max_value=20.0),
)
def test_bessel_recurrence(q, z):
    lhs = bessel_k(q + 1.0, z)
    rhs = bessel_k(q - 1.0, z) + (2.0 * q / z) * bessel_k(q, z)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_bessel_domain_errors():
    with pytest.raises(ModelError):
        bessel_k(0.5, 0.0)
    with pytest.raises(ModelError):
        log_bessel_k(0.5, -1.0)


# ---------------------------------------------------------------------------
# GIG normalization and densities


def gig_quad_mass(p: GigParams):
    val, _ = quad(
        lambda x: np.exp(gig_log_density(p, x)), 0.0, np.inf,
        epsabs=1e-13, epsrel=1e-12,
    )
    return val


@pytest.mark.parametrize(
    "a,b,q",
    [
        (1.0, 1.0, 0.5),
        (1.0, 2.0, -0.5),
        (0.7, 1.3, 1.5),
        (2.0, 0.4, -1.0),
        (1.0, 0.0, 0.5),
        (0.5, 0.0, 2.0),
    ],
)
def test_gig_density_normalized(a, b, q):
    assert gig_quad_mass(GigParams(a, b, q)) == pytest.approx(1.0, abs=1e-9)


def test_gig_validation():
    with pytest.raises(ModelError):
        GigParams(0.0, 1.0, 0.5)
    with pytest.raises(ModelError):
        GigParams(1.0, -1.0, 0.5)
    with pytest.raises(ModelError):
        GigParams(1.0, 0.0, -0.5)  # b = 0 needs q > 0
    with pytest.raises(ModelError):
        gig_log_density(GigParams(1.0, 1.0, 0.5), 0.0)


# ---------------------------------------------------------------------------
# Laplace transforms against density quadrature


def lt_quad(p: GigParams, s):
    val, _ = quad(
        lambda x: np.exp(-s * x + gig_log_density(p, x)), 0.0, np.inf,
        epsabs=1e-13, epsrel=1e-12,
    )
    return val


@pytest.mark.parametrize("a,b", [(1.0, 2.0), (0.7, 1.0), (2.0, 0.5)])
def test_ig_laplace_matches_density(a, b):
    p = GigParams(a, b, -0.5)
    for s in (0.0, 0.5, 2.0, 5.0):
        assert float(ig_laplace(a, b, s)) == pytest.approx(lt_quad(p, s), abs=1e-9)


@pytest.mark.parametrize("a,b", [(1.0, 2.0), (0.7, 1.0), (1.5, 0.0)])
def test_rig_laplace_matches_density(a, b):
    p = GigParams(a, b, 0.5)
    for s in (0.0, 0.5, 2.0):
        assert float(rig_laplace(a, b, s)) == pytest.approx(lt_quad(p, s), abs=1e-9)


def test_rig_is_gamma_plus_ig_in_transform():
    a, b = 1.2, 0.8
    for s in (0.3, 1.0, 4.0):
        gamma_lt = (a**2 / (a**2 + s)) ** 0.5
        assert float(rig_laplace(a, b, s)) == pytest.approx(
            gamma_lt * float(ig_laplace(a, b, s)), rel=1e-14
        )


def test_laplace_domain_errors():
    with pytest.raises(ModelError):
        ig_laplace(1.0, 1.0, -2.0)
    with pytest.raises(ModelError):
        ig_laplace(1.0, 0.0, 1.0)
    with pytest.raises(ModelError):
        rig_laplace(1.0, -0.1, 1.0)


def test_rig_moments_match_density_quadrature():
    for a, b in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.0)]:
        p = GigParams(a, b, 0.5)
        m1, _ = quad(lambda x: x * np.exp(gig_log_density(p, x)), 0, np.inf)
        m2, _ = quad(lambda x: x * x * np.exp(gig_log_density(p, x)), 0, np.inf)
        mean, var = rig_moments(a, b)
        assert mean == pytest.approx(m1, rel=1e-9)
        assert var == pytest.approx(m2 - m1 * m1, rel=1e-8)


# ---------------------------------------------------------------------------
# CDFs


def test_ig_cdf_matches_density_quadrature():
    a, b = 1.0, 2.0
    p = GigParams(a, b, -0.5)
    for x in (0.2, 0.7, 1.5, 4.0):
        ref, _ = quad(lambda u: np.exp(gig_log_density(p, u)), 0.0, x)
        assert float(ig_cdf(a, b, x)) == pytest.approx(ref, abs=1e-10)


def test_rig_cdf_matches_density_quadrature():
    for a, b in [(1.0, 2.0), (0.8, 0.0)]:
        p = GigParams(a, b, 0.5)
        for x in (0.2, 0.7, 1.5, 4.0):
            ref, _ = quad(lambda u: np.exp(gig_log_density(p, u)), 0.0, x)
            assert float(rig_cdf(a, b, x)) == pytest.approx(ref, abs=1e-10)


def test_ig_cdf_stable_for_large_shape():
    # 2 lam / mu = 2 a b can overflow exp on its own; the folded form cannot
    val = ig_cdf(400.0, 2.0, 0.0025)
    assert 0.0 <= float(val) <= 1.0


def test_ig_mean_shape():
    mu, lam = ig_mean_shape(1.0, 2.0)
    assert mu == 1.0 and lam == 2.0


# ---------------------------------------------------------------------------
# Samplers


def test_sample_ig_ks():
    rng = np.random.default_rng(5)
    draws = sample_ig(1.0, 2.0, rng, 50_000)
    assert kstest(draws, lambda x: ig_cdf(1.0, 2.0, x)).pvalue > 1e-3


def test_sample_rig_ks():
    rng = np.random.default_rng(6)
    for a, b in [(1.0, 1.5), (0.7, 0.0)]:
        draws = sample_rig(a, b, rng, 50_000)
        assert kstest(draws, lambda x: rig_cdf(a, b, x)).pvalue > 1e-3


def test_sample_gamma_half_ks():
    rng = np.random.default_rng(7)
    draws = sample_gamma_half(2.25, rng, 50_000)
    assert kstest(draws, gamma_dist(a=0.5, scale=1.0 / 2.25).cdf).pvalue > 1e-3


def test_sampler_validation():
    rng = np.random.default_rng(8)
    with pytest.raises(ModelError):
        sample_ig(1.0, 0.0, rng, 10)
    with pytest.raises(ModelError):
        sample_rig(-1.0, 1.0, rng, 10)
    with pytest.raises(ModelError):
        sample_gamma_half(0.0, rng, 10)
