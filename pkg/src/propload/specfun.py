"""Special functions used by the propagators and the Bessel-integral identities.

Complex ``erf``/``erfi``, Bessel ``I`` and the Airy functions wrap scipy's
implementations (Faddeeva and AMOS based).  The confluent and Gauss
hypergeometric functions and the orthogonal polynomials are implemented here
because scipy's complex-argument ``hyp1f1`` loses accuracy in the regimes the
propagators need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

__all__ = [
    "SeriesControl",
    "SpecfunError",
    "erf_complex",
    "erfi",
    "hyp1f1",
    "hyp1f1_series",
    "hyp2f1",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_j",
    "airy_ai",
    "airy_ai_prime",
    "airy_zeros",
    "ortho_poly",
    "hermite",
    "laguerre",
    "jacobi",
    "legendre",
    "gegenbauer",
]

ERF_DOMAIN = 30.0
HYP1F1_SERIES_RADIUS = 8.0
HYP1F1_STEP = 2.0


class SpecfunError(ArithmeticError):
    """Raised for arguments outside a documented domain or non-convergence."""


@dataclass(frozen=True)
class SeriesControl:
    max_terms: int = 500
    rel_tol: float = 1e-12
    abs_floor: float = 1e-300

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


DEFAULT_CONTROL = SeriesControl()


def _as_complex(z):
    za = np.asarray(z, dtype=complex)
    return za, za.ndim == 0


def _out(v, scalar):
    return complex(v.reshape(-1)[0]) if scalar else v


# error functions -------------------------------------------------------------

def erf_complex(z):
    """Error function of complex argument, ``|z| <= 30``."""
    za, scalar = _as_complex(z)
    if np.any(np.abs(za) > ERF_DOMAIN):
        raise SpecfunError(f"erf argument outside |z| <= {ERF_DOMAIN}")
    with np.errstate(over="ignore", invalid="ignore"):
        v = sp.erf(za)
    return _out(v, scalar)


def erfi(z):
    """Imaginary error function ``erf(iz)/i``."""
    za, scalar = _as_complex(z)
    v = -1j * np.asarray(erf_complex(1j * za), dtype=complex)
    if np.all(za.imag == 0):
        v = v.real + 0j
    return _out(v, scalar)


# confluent hypergeometric ----------------------------------------------------

def hyp1f1_series(a, b, z, control: SeriesControl = DEFAULT_CONTROL):
    """Plain Maclaurin series for ``1F1(a; b; z)`` (vectorized over ``z``)."""
    za, scalar = _as_complex(z)
    a, b = complex(a), complex(b)
    _check_b(b)
    term = np.ones_like(za)
    total = np.ones_like(za)
    quiet = np.zeros(za.shape, dtype=int)
    for k in range(control.max_terms):
        term = term * (a + k) / ((b + k) * (k + 1)) * za
        total = total + term
        small = np.abs(term) <= control.rel_tol * np.abs(total) + control.abs_floor
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 2) or (a + k + 1 == 0):
            break
    else:
        if not np.all(quiet >= 1):
            raise SpecfunError("1F1 series did not converge")
    return _out(total, scalar)


def _check_b(b):
    if b.imag == 0 and b.real <= 0 and b.real == int(b.real):
        raise SpecfunError("1F1 undefined for non-positive integer b")


def _taylor_march(a, b, z0, w, dw, z1, nsteps, nterms=70):
    """Integrate ``z w'' + (b - z) w' - a w = 0`` from ``z0`` to ``z1`` by Taylor steps."""
    h = (z1 - z0) / nsteps
    zc = z0.copy()
    for _ in range(nsteps):
        d0, d1 = w, dw * h
        sw = d0 + d1
        sdw = d1.copy()
        for k in range(nterms):
            d2 = ((k + a) * d0 * h * h - (k + 1) * (k + b - zc) * d1 * h) / (zc * (k + 2) * (k + 1))
            sw = sw + d2
            sdw = sdw + (k + 2) * d2
            d0, d1 = d1, d2
            if k > 8 and np.all(np.abs(d2) <= 1e-17 * (np.abs(sw) + 1e-300)):
                break
        w = sw
        dw = np.where(h != 0, sdw / np.where(h != 0, h, 1), dw)
        zc = zc + h
    return w


def _hyp1f1_right(a, b, z, control):
    """``1F1`` for ``Re z >= 0``: series inside ``R0``, analytic continuation outside."""
    out = np.empty_like(z)
    inner = np.abs(z) <= HYP1F1_SERIES_RADIUS
    if np.any(inner):
        out[inner] = hyp1f1_series(a, b, z[inner], control)
    outer = ~inner
    if np.any(outer):
        zo = z[outer]
        z0 = HYP1F1_SERIES_RADIUS * zo / np.abs(zo)
        w0 = np.asarray(hyp1f1_series(a, b, z0, control), dtype=complex)
        dw0 = np.asarray(hyp1f1_series(a + 1, b + 1, z0, control), dtype=complex) * (a / b)
        nsteps = int(math.ceil(np.max(np.abs(zo - z0)) / HYP1F1_STEP))
        out[outer] = _taylor_march(a, b, z0, w0, dw0, zo, max(nsteps, 1))
    return out


def hyp1f1(a, b, z, control: SeriesControl = DEFAULT_CONTROL):
    """Kummer function ``1F1(a; b; z)`` for complex ``a, b, z``.

    Negative real parts go through ``1F1(a;b;z) = e^z 1F1(b-a;b;-z)``.  For
    ``|z|`` above ``HYP1F1_SERIES_RADIUS`` the value is continued from the series
    along the ray ``arg z`` by Taylor stepping of Kummer's equation.
    """
    za, scalar = _as_complex(z)
    a, b = complex(a), complex(b)
    _check_b(b)
    flat = za.reshape(-1)
    out = np.empty_like(flat)
    if a == 0:
        out[:] = 1.0
        return _out(out.reshape(za.shape), scalar)
    poly = a.imag == 0 and a.real <= 0 and a.real == int(a.real)
    neg = (flat.real < 0) & (not poly)
    if np.any(~neg):
        zr = flat[~neg]
        out[~neg] = hyp1f1_series(a, b, zr, control) if poly else _hyp1f1_right(a, b, zr, control)
    if np.any(neg):
        zn = flat[neg]
        if b - a == 0:
            out[neg] = np.exp(zn)
        else:
            out[neg] = np.exp(zn) * _hyp1f1_right(b - a, b, -zn, control)
    return _out(out.reshape(za.shape), scalar)


# Gauss hypergeometric --------------------------------------------------------

def _hyp2f1_series(a, b, c, z, control):
    term = np.ones_like(z)
    total = np.ones_like(z)
    quiet = np.zeros(z.shape, dtype=int)
    az = np.max(np.abs(z)) if z.size else 0.0
    nmax = control.max_terms
    if az > 0.5:
        nmax = max(nmax, int(math.log(1e-17) / math.log(az)) + 50)
    for k in range(nmax):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total = total + term
        small = np.abs(term) <= control.rel_tol * np.abs(total) + control.abs_floor
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 2):
            return total
    raise SpecfunError("2F1 series did not converge")


def hyp2f1(a, b, c, z, control: SeriesControl = DEFAULT_CONTROL):
    """Gauss ``2F1(a, b; c; z)`` for ``|z| < 1``.

    Uses the Maclaurin series, switching to the Pfaff transformation
    ``(1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`` when that argument is smaller.  Points
    with ``|z| >= 1`` are outside the supported domain.
    """
    za, scalar = _as_complex(z)
    a, b, c = complex(a), complex(b), complex(c)
    if c.imag == 0 and c.real <= 0 and c.real == int(c.real):
        raise SpecfunError("2F1 undefined for non-positive integer c")
    flat = za.reshape(-1)
    if np.any(np.abs(flat) >= 1):
        raise SpecfunError("2F1 implemented for |z| < 1 only")
    out = np.empty_like(flat)
    w = flat / (flat - 1)
    pf = np.abs(w) < np.abs(flat)
    if np.any(~pf):
        out[~pf] = _hyp2f1_series(a, b, c, flat[~pf], control)
    if np.any(pf):
        out[pf] = (1 - flat[pf]) ** (-a) * _hyp2f1_series(a, c - b, c, w[pf], control)
    return _out(out.reshape(za.shape), scalar)


# Bessel ----------------------------------------------------------------------

COMPLEX_ORDER_MAX_ARG = 40.0
BESSEL_CANCEL_MAX = 1e4


def _bessel_series(nu, za, sign, control: SeriesControl = DEFAULT_CONTROL):
    # sum_k sign^k (z/2)^(2k+nu) / (k! Gamma(k+nu+1)), for complex order
    if np.any(np.abs(za) > COMPLEX_ORDER_MAX_ARG):
        raise SpecfunError(f"complex-order Bessel series limited to |z| <= {COMPLEX_ORDER_MAX_ARG}")
    nu = complex(nu)
    h = za / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(nu * np.log(h) - sp.loggamma(nu + 1))
    lead = np.where(h == 0, 0.0, lead)
    term = np.ones_like(za)
    total = term.copy()
    biggest = np.ones(za.shape)
    q = sign * h * h
    for k in range(1, control.max_terms):
        term = term * q / (k * (k + nu))
        total = total + term
        biggest = np.maximum(biggest, np.abs(term))
        if np.all(np.abs(term) <= control.rel_tol * np.abs(total)):
            if np.any(biggest > BESSEL_CANCEL_MAX * np.abs(total)):
                raise SpecfunError("complex-order Bessel series loses too many digits here")
            return lead * total
    raise SpecfunError("complex-order Bessel series did not converge")


def bessel_i(nu, z):
    """Modified Bessel ``I_nu(z)``; complex order uses the power series where it keeps 12 digits."""
    za, scalar = _as_complex(z)
    if np.imag(nu) != 0:
        return _out(_bessel_series(nu, za, +1), scalar)
    v = np.asarray(sp.iv(float(np.real(nu)), za), dtype=complex)
    return _out(v, scalar)


def bessel_i_scaled(nu, z):
    """``exp(-|Re z|) I_nu(z)``, finite for large arguments (real order)."""
    if np.imag(nu) != 0:
        raise SpecfunError("scaled Bessel I needs a real order")
    za, scalar = _as_complex(z)
    v = np.asarray(sp.ive(float(np.real(nu)), za), dtype=complex)
    return _out(v, scalar)


def bessel_j(nu, z):
    """Bessel ``J_nu(z)``; complex order uses the power series where it keeps 12 digits."""
    za, scalar = _as_complex(z)
    if np.imag(nu) != 0:
        return _out(_bessel_series(nu, za, -1), scalar)
    v = np.asarray(sp.jv(float(np.real(nu)), za), dtype=complex)
    return _out(v, scalar)


# Airy ------------------------------------------------------------------------

def airy_ai(x):
    return sp.airy(x)[0]


def airy_ai_prime(x):
    return sp.airy(x)[1]


def airy_zeros(n: int) -> np.ndarray:
    """First ``n`` zeros of ``Ai``, in decreasing order (most negative last)."""
    if not 1 <= n <= 50:
        raise ValueError("n must be in 1..50")
    zeros = sp.ai_zeros(n)[0]
    # one Newton step against the evaluator used elsewhere
    ai, aip = sp.airy(zeros)[:2]
    return zeros - ai / aip


# orthogonal polynomials ------------------------------------------------------

def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n``."""
    x = np.asarray(x, dtype=float)
    h0, h1 = np.ones_like(x), 2 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * k * h0
    return h1


def laguerre(n: int, alpha: float, x):
    """Generalized Laguerre ``L_n^{(alpha)}`` (``x`` may be complex)."""
    x = np.asarray(x)
    l0 = np.ones_like(x, dtype=np.result_type(x, float))
    l1 = 1 + alpha - x
    if n == 0:
        return l0
    for k in range(1, n):
        l0, l1 = l1, ((2 * k + 1 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1)
    return l1


def jacobi(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial ``P_n^{(alpha, beta)}``."""
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = 0.5 * (alpha - beta + (alpha + beta + 2) * x)
    for k in range(1, n):
        c = 2 * k + alpha + beta
        a1 = 2 * (k + 1) * (k + alpha + beta + 1) * c
        a2 = (c + 1) * (alpha**2 - beta**2)
        a3 = c * (c + 1) * (c + 2)
        a4 = 2 * (k + alpha) * (k + beta) * (c + 2)
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1


def legendre(n: int, x):
    return jacobi(n, 0.0, 0.0, x)


def gegenbauer(n: int, lam: float, x):
    x = np.asarray(x, dtype=float)
    c0 = np.ones_like(x)
    if n == 0:
        return c0
    c1 = 2 * lam * x
    for k in range(1, n):
        c0, c1 = c1, (2 * x * (k + lam) * c1 - (k + 2 * lam - 1) * c0) / (k + 1)
    return c1


def ortho_poly(kind: str, n: int, x, *params):
    """Dispatch by name: hermite, laguerre(alpha), jacobi(alpha, beta), legendre, gegenbauer(lam)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    table = {
        "hermite": (hermite, 0),
        "laguerre": (laguerre, 1),
        "jacobi": (jacobi, 2),
        "legendre": (legendre, 0),
        "gegenbauer": (gegenbauer, 1),
    }
    if kind not in table:
        raise ValueError(f"unknown polynomial family {kind!r}")
    fn, npar = table[kind]
    if len(params) != npar:
        raise ValueError(f"{kind} takes {npar} parameter(s)")
    return fn(n, *params, x)
