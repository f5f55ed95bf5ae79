"""Special functions against independent libraries and identities."""
import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from propload.specfun import (
    SeriesControl, SpecfunError, airy_ai, airy_zeros, bessel_i, bessel_i_scaled, bessel_j, erf_complex, erfi,
    gegenbauer, hermite, hyp1f1, hyp1f1_series, hyp2f1, jacobi, laguerre, legendre, ortho_poly,
)


def mp(z):
    return complex(z)


@pytest.mark.parametrize("z", [0.3, -1.2, 0.5 + 0.7j, 2.0 - 1.5j, 3j])
def test_erf_vs_mpmath(z):
    assert erf_complex(z) == pytest.approx(mp(mpmath.erf(z)), rel=1e-12, abs=1e-14)
    assert erfi(z) == pytest.approx(mp(mpmath.erfi(z)), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("a,b,z", [
    (0.5, 1.5, 2.0), (1.25, 0.75, -3.0), (0.3 + 0.2j, 1.7, 1.1 - 0.4j), (2.0, 3.5, -12.0), (-1.5, 0.5, 4.0),
    (0.75, 1.5, 25.0 + 5j),
])
def test_hyp1f1_vs_mpmath(a, b, z):
    assert hyp1f1(a, b, z) == pytest.approx(mp(mpmath.hyp1f1(a, b, z)), rel=1e-9)


def test_hyp1f1_series_control():
    with pytest.raises(SpecfunError):
        hyp1f1_series(0.5, 1.5, 40.0, SeriesControl(max_terms=10))
    with pytest.raises((ValueError, SpecfunError)):
        hyp1f1(0.5, -2.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(0.3, 3), x=st.floats(-8, 8))
def test_kummer_transformation(a, b, x):
    lhs = hyp1f1(a, b, x)
    rhs = math.exp(x) * hyp1f1(b - a, b, -x)
    assert abs(lhs - rhs) <= 1e-8 * max(1, abs(lhs))


@pytest.mark.parametrize("a,b,c,z", [
    (0.5, 1.0, 1.5, 0.3), (0.25, 0.75, 1.5, -0.8), (1.2, 0.4, 2.1, 0.9), (0.3 + 0.1j, 0.6, 1.4, 0.5 - 0.2j),
])
def test_hyp2f1_vs_mpmath(a, b, c, z):
    assert hyp2f1(a, b, c, z) == pytest.approx(mp(mpmath.hyp2f1(a, b, c, z)), rel=1e-9)


@pytest.mark.parametrize("nu,z", [(0.5, 1.3), (2.0, 0.4 + 0.8j), (0.3 + 0.4j, 1.7), (1.5, -2.0 + 0.5j), (0.75, 30.0)])
def test_bessel_vs_mpmath(nu, z):
    assert bessel_i(nu, z) == pytest.approx(mp(mpmath.besseli(nu, z)), rel=1e-9)
    assert bessel_j(nu, z) == pytest.approx(mp(mpmath.besselj(nu, z)), rel=1e-9)


def test_bessel_scaled():
    z = 40.0
    assert bessel_i_scaled(1.5, z) == pytest.approx(sp.ive(1.5, z), rel=1e-12)
    assert bessel_i(1.5, z) == pytest.approx(sp.iv(1.5, z), rel=1e-12)


def test_airy():
    zs = airy_zeros(6)
    np.testing.assert_allclose(zs, [float(mpmath.airyaizero(k)) for k in range(1, 7)], rtol=1e-10)
    np.testing.assert_allclose(airy_ai(zs), 0, atol=1e-12)
    assert airy_ai(0.0) == pytest.approx(1 / (3 ** (2 / 3) * math.gamma(2 / 3)))


def test_orthogonal_polynomials():
    x = np.linspace(-0.9, 0.9, 7)
    np.testing.assert_allclose(hermite(3, x), 8 * x**3 - 12 * x)
    np.testing.assert_allclose(laguerre(2, 0.5, x), sp.eval_genlaguerre(2, 0.5, x))
    np.testing.assert_allclose(jacobi(3, 0.5, 1.5, x), sp.eval_jacobi(3, 0.5, 1.5, x))
    np.testing.assert_allclose(legendre(2, x), 1.5 * x**2 - 0.5)
    np.testing.assert_allclose(gegenbauer(3, 0.75, x), sp.eval_gegenbauer(3, 0.75, x))
    np.testing.assert_allclose(ortho_poly("hermite", 2, x), hermite(2, x))
    with pytest.raises(ValueError):
        ortho_poly("chebyshev7", 2, x)
