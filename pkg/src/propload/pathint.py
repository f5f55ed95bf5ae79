"""Bessel-integral identities behind the radial oscillator path integral.

Every closed form here has a quadrature oracle.  Integrals that only converge
conditionally on the real axis are checked along damped parameter paths
(complex ``p``, or angles shifted slightly below the real axis); the identities
are analytic in those parameters, so agreement along the path is the check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special as sp

from .specfun import SpecfunError, bessel_i, bessel_j, hyp2f1

__all__ = [
    "WeberParams",
    "VFunctionArgs",
    "OracleResult",
    "weber_closed",
    "weber_oracle",
    "coupling_w",
    "upsilon_series",
    "upsilon2_closed",
    "upsilon_oracle",
    "v_function",
    "v_compose",
    "v_compose_check",
    "v_delta_check",
    "radial_lambda",
    "radial_khat",
    "khat_compose_check",
    "appendix_report",
]

TAIL_TOL = 1e-17
SERIES_CUTOFF = 80


@dataclass(frozen=True)
class WeberParams:
    """``a, b > 0``, ``|arg p| < pi/4``, ``Re nu > -1``."""

    a: float
    b: float
    p: complex
    nu: complex

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("a and b must be positive")
        if not abs(cmath.phase(complex(self.p))) < math.pi / 4:
            raise ValueError("need |arg p| < pi/4")
        if not np.real(self.nu) > -1:
            raise ValueError("need Re(nu) > -1")


@dataclass(frozen=True)
class VFunctionArgs:
    """``Re nu > -1``, ``eta, eta' > 0``, ``0 < phi < pi``."""

    nu: complex
    eta: float
    eta_p: float
    phi: float

    def __post_init__(self):
        if not np.real(self.nu) > -1:
            raise ValueError("need Re(nu) > -1")
        if not (self.eta > 0 and self.eta_p > 0):
            raise ValueError("eta and eta' must be positive")
        if not 0 < self.phi < math.pi:
            raise ValueError("need 0 < phi < pi")


@dataclass(frozen=True)
class OracleResult:
    name: str
    params: dict
    closed: complex
    oracle: complex
    tol: float

    @property
    def rel_err(self) -> float:
        return abs(self.closed - self.oracle) / max(abs(self.oracle), 1e-300)

    @property
    def passed(self) -> bool:
        return self.rel_err <= self.tol

    def to_dict(self) -> dict:
        def c(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "name": self.name,
            "params": {k: (c(v) if isinstance(v, complex) else v) for k, v in self.params.items()},
            "closed": c(self.closed),
            "oracle": c(self.oracle),
            "rel_err": self.rel_err,
            "tol": self.tol,
            "pass": self.passed,
        }


def _cquad(f, lo, hi, epsabs=1e-15, epsrel=1e-12, limit=5000, points=None) -> tuple[complex, float]:
    def g(t):
        v = f(t)
        return np.array([v.real, v.imag])

    res, err = integrate.quad_vec(g, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points)
    return complex(res[0], res[1]), float(err)


# Weber -----------------------------------------------------------------------

def weber_closed(params: WeberParams) -> complex:
    """``int_0^inf e^{-p^2 t^2} J_nu(a t) J_nu(b t) t dt = e^{-(a^2+b^2)/4p^2} I_nu(ab/2p^2) / 2p^2``."""
    a, b, p, nu = params.a, params.b, complex(params.p), params.nu
    p2 = p * p
    return complex(cmath.exp(-(a * a + b * b) / (4 * p2)) * bessel_i(nu, a * b / (2 * p2)) / (2 * p2))


def _bessel_tail_scale(nu) -> float:
    return max(1.0, math.cosh(math.pi * abs(np.imag(nu)) / 2)) ** 2


def weber_oracle(params: WeberParams) -> tuple[complex, float]:
    """Quadrature on ``[0, T]`` plus a bound on the discarded tail; returns ``(value, tail_bound)``."""
    a, b, p, nu = params.a, params.b, complex(params.p), params.nu
    p2 = p * p
    rp = p2.real
    c = _bessel_tail_scale(nu)
    T = math.sqrt(max(math.log(c / (2 * rp * TAIL_TOL)), 1.0) / rp)
    tail = c * math.exp(-rp * T * T) / (2 * rp)

    def f(t):
        return np.exp(-p2 * t * t) * bessel_j(nu, a * t) * bessel_j(nu, b * t) * t

    val, err = _cquad(f, 0.0, T)
    return val, tail + err


# Upsilon(h) ------------------------------------------------------------------

def coupling_w(m, r, v, h) -> complex:
    """``Gamma(h(m+v+2r)+1) / Gamma(m+v+2r+1)``; equals 1 for ``h = 1``."""
    z = m + v + 2 * r
    return complex(np.exp(sp.loggamma(h * z + 1) - sp.loggamma(z + 1)))


def upsilon_series(h: int, a: float, b: float, p, v, m_max: int = SERIES_CUTOFF,
                   r_max: int = SERIES_CUTOFF, tail_tol: float = 1e-13) -> complex:
    """``int_0^inf x e^{-p x^2} J_v(a x^h) J_v(b x^h) dx`` from the coupled double series.

    Terms are summed on the ``(m, r)`` grid up to the cutoffs.  The last row and
    column form the tail; if it is not below ``tail_tol`` relative to the sum,
    or grows towards the cutoff, the series is declared divergent.
    """
    p = complex(p)
    ph = p**h
    m = np.arange(m_max + 1)[:, None]
    r = np.arange(r_max + 1)[None, :]
    z = m + v + 2 * r
    x = a * b / (4 * ph)
    y = (a * a + b * b) / (4 * ph)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        logt = (sp.loggamma(h * z + 1) - sp.loggamma(z + 1) - sp.gammaln(r + 1) - sp.loggamma(v + r + 1)
                - sp.gammaln(m + 1) + 2 * r * np.log(x) + m * np.log(y))
        terms = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(logt)
    if not np.all(np.isfinite(terms)):
        raise SpecfunError("double series overflowed; parameters outside its convergence domain")
    total = terms.sum()
    edge = max(np.max(np.abs(terms[-1, :])), np.max(np.abs(terms[:, -1])))
    inner = max(np.max(np.abs(terms[-5, :])), np.max(np.abs(terms[:, -5])))
    if edge > tail_tol * abs(total) or (edge > inner and edge > 1e-300):
        raise SpecfunError("double series tail is not decaying; outside the convergence domain")
    return complex(total / (2 * p) * x**v)


def upsilon2_closed(a: float, b: float, p, v) -> complex:
    """``h = 2`` case in terms of ``2F1((1+2v)/4, (3+2v)/4; 1+v; (2ab / (a^2+b^2+p^2))^2)``."""
    p = complex(p)
    s = a * a + b * b + p * p
    z = (2 * a * b / s) ** 2
    if not abs(z) < 1:
        raise SpecfunError("need |2ab / (a^2+b^2+p^2)| < 1")
    pre = 1 / (2 * math.sqrt(math.pi) * cmath.sqrt(s)) * np.exp(sp.loggamma(0.5 + v) - sp.loggamma(1 + v))
    return complex(pre * (a * b / s) ** v * hyp2f1((1 + 2 * v) / 4, (3 + 2 * v) / 4, 1 + v, z))


def upsilon_oracle(h: int, a: float, b: float, p, v) -> tuple[complex, float]:
    """Quadrature of ``int_0^inf x e^{-p x^2} J_v(a x^h) J_v(b x^h) dx`` (``Re p > 0``)."""
    p = complex(p)
    rp = p.real
    if not rp > 0:
        raise ValueError("oracle needs Re p > 0")
    c = _bessel_tail_scale(v)
    T = math.sqrt(max(math.log(c / (2 * rp * TAIL_TOL)), 1.0) / rp)
    tail = c * math.exp(-rp * T * T) / (2 * rp)

    def f(x):
        return x * np.exp(-p * x * x) * bessel_j(v, a * x**h) * bessel_j(v, b * x**h)

    val, err = _cquad(f, 0.0, T)
    return val, tail + err


# v-function ------------------------------------------------------------------

def v_function(nu, eta, eta_p, phi):
    """``-i csc(phi) exp[i(eta+eta') cot(phi)] I_nu(-2i sqrt(eta eta') csc(phi))``.

    ``phi`` may be complex; a small negative imaginary part damps the
    oscillation in ``eta``.  The exponential and Bessel growth are combined
    in log space so the purely imaginary-angle (heat-kernel) case is stable.
    """
    phi = complex(phi)
    eta = np.asarray(eta, dtype=float)
    eta_p = np.asarray(eta_p, dtype=float)
    csc = 1 / cmath.sin(phi)
    cot = cmath.cos(phi) * csc
    z = -2j * np.sqrt(eta * eta_p) * csc
    if np.imag(nu) == 0:
        scaled = sp.ive(float(np.real(nu)), z)
        expo = 1j * (eta + eta_p) * cot + np.abs(np.real(z))
        return -1j * csc * np.exp(expo) * scaled
    return -1j * csc * np.exp(1j * (eta + eta_p) * cot) * bessel_i(nu, z)


def v_compose(nu, eta2, eta1, phi2, phi1) -> tuple[complex, complex]:
    """``(int_0^inf v(eta'', eta, phi'') v(eta, eta', phi') d eta, v(eta'', eta', phi''+phi'))``."""
    phi2, phi1 = complex(phi2), complex(phi1)
    decay = np.imag(1 / cmath.tan(phi2)) + np.imag(1 / cmath.tan(phi1))
    if not decay > 0:
        raise ValueError("composition quadrature needs damped angles (negative imaginary parts)")
    hi = 45.0 / decay

    def f(eta):
        return v_function(nu, eta2, eta, phi2) * v_function(nu, eta, eta1, phi1)

    lhs, _ = _cquad(f, 0.0, hi, epsabs=1e-13, epsrel=1e-11, limit=20000)
    rhs = complex(v_function(nu, eta2, eta1, phi2 + phi1))
    return lhs, rhs


def v_compose_check(nu, eta2, eta1, phi2, phi1, damping: float = 0.05) -> float:
    """Residual of the composition law along angles shifted by ``-i damping``."""
    lhs, rhs = v_compose(nu, eta2, eta1, phi2 - 1j * damping, phi1 - 1j * damping)
    return abs(lhs - rhs)


def v_delta_check(nu, eta, tau: float = 1e-4, width: float = 0.5, centre: float = 1.0) -> tuple[float, float]:
    """``int v(eta, eta'; -i tau) g(eta') d eta'`` against ``g(eta)`` for a Gaussian ``g``.

    At the imaginary angle ``-i tau`` the v-function is a positive heat kernel,
    and as ``tau -> 0`` it concentrates on ``eta' = eta``.
    """
    def g(e):
        return np.exp(-((e - centre) ** 2) / (2 * width**2))

    spread = 8 * math.sqrt(max(eta, 1e-3) * tau) + 8 * tau
    lo, hi = max(eta - spread, 0.0), eta + spread

    def f(e):
        return v_function(nu, eta, e, -1j * tau) * g(e)

    val, _ = _cquad(f, lo, hi, epsabs=1e-12, epsrel=1e-10, points=[eta] if lo < eta < hi else None)
    return float(val.real), float(g(eta))


# radial propagator -----------------------------------------------------------

def radial_lambda(n: int, ell: int, b: float) -> float:
    """Effective Bessel order ``[(ell + (n-2)/2)^2 + b]^(1/2)``."""
    q = (ell + (n - 2) / 2) ** 2 + b
    if q < 0:
        raise ValueError("need (ell + (n-2)/2)^2 + b >= 0")
    return math.sqrt(q)


def radial_khat(n: int, ell: int, b: float, r2, r1, tau, M: float = 1.0, omega: float = 1.0,
                hbar: float = 1.0):
    """Partial-wave propagator of the ``n``-dimensional radial oscillator with a ``b / r^2`` term.

    ``(M omega / hbar) (r'' r')^(-(n-2)/2) v_lambda(eta'', eta'; omega tau)`` with
    ``eta = M omega r^2 / 2 hbar``.  ``tau`` may be complex for damped checks.
    """
    if n not in (1, 3):
        raise ValueError("n must be 1 or 3")
    if b <= -((n / 2 - 1) ** 2):
        raise ValueError("need b > -(n/2 - 1)^2")
    phi = omega * complex(tau)
    j = round(phi.real / math.pi)
    if j >= 1 and abs(phi - j * math.pi) < 1e-3:
        raise ValueError("omega tau is at a caustic")
    r2 = np.asarray(r2, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    lam = radial_lambda(n, ell, b)
    k = M * omega / (2 * hbar)
    return M * omega / hbar * (r2 * r1) ** (-(n - 2) / 2) * v_function(lam, k * r2**2, k * r1**2, phi)


def khat_compose_check(n: int, ell: int, b: float, r2: float, r1: float, tau2: float, tau1: float,
                       damping: float = 0.05, M: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> float:
    """Relative residual of ``int K(r'', r; tau2) K(r, r'; tau1) r^(n-1) dr = K(r'', r'; tau1 + tau2)``."""
    t2 = complex(tau2) * (1 - 1j * damping)
    t1 = complex(tau1) * (1 - 1j * damping)
    decay = M * omega / (2 * hbar) * (np.imag(1 / cmath.tan(omega * t2)) + np.imag(1 / cmath.tan(omega * t1)))
    hi = math.sqrt(45.0 / decay)

    def f(r):
        return (radial_khat(n, ell, b, r2, r, t2, M, omega, hbar) * radial_khat(n, ell, b, r, r1, t1, M, omega, hbar)
                * r ** (n - 1))

    lhs, _ = _cquad(f, 0.0, hi, epsabs=1e-13, epsrel=1e-11, limit=20000)
    rhs = complex(radial_khat(n, ell, b, r2, r1, t2 + t1, M, omega, hbar))
    return abs(lhs - rhs) / abs(rhs)


# report ----------------------------------------------------------------------

WEBER_POINTS = (
    (1.0, 1.0, 1.0, 0.5),
    (0.7, 1.3, 1.2, 0.0),
    (1.0, 2.0, 0.9 * cmath.exp(0.3j), 1.5),
    (0.5, 0.8, 1.1 * cmath.exp(-0.6j), 0.3 + 0.4j),
)
UPSILON1_POINTS = ((1.0, 1.0, 2.0, 0.5), (0.4, 0.9, 3.0, 1.0), (0.6, 0.5, 2.5 + 0.5j, 0.25))
UPSILON2_POINTS = ((0.5, 0.7, 1.5, 1.0), (0.3, 0.4, 1.2, 0.5), (0.4, 0.6, 1.4 + 0.3j, 2.0))
V_POINTS = ((0.5, 0.8, 1.1, 0.4, 0.3), (1.0, 0.5, 0.7, 0.6, 0.5), (0.25, 1.2, 0.9, 0.3, 0.9))
KHAT_POINTS = ((3, 0, 0.0, 0.8, 1.1, 0.3, 0.5), (1, 1, 0.5, 0.6, 0.9, 0.4, 0.2), (3, 2, 0.3, 1.0, 0.7, 0.25, 0.35))


def appendix_report() -> list[OracleResult]:
    """Every closed form against its oracle at fixed parameter points."""
    out: list[OracleResult] = []
    for a, b, p, nu in WEBER_POINTS:
        wp = WeberParams(a, b, p, nu)
        out.append(OracleResult("weber", asdict(wp), weber_closed(wp), weber_oracle(wp)[0], 1e-8))
    for a, b, p, v in UPSILON1_POINTS:
        prm = {"h": 1, "a": a, "b": b, "p": complex(p), "v": v}
        # the h = 1 series against Weber's closed form with p -> sqrt(p)
        wp = WeberParams(a, b, cmath.sqrt(p), v)
        out.append(OracleResult("upsilon_series_h1", prm, upsilon_series(1, a, b, p, v), weber_closed(wp), 1e-8))
    for a, b, p, v in UPSILON2_POINTS:
        prm = {"a": a, "b": b, "p": complex(p), "v": v}
        closed = upsilon2_closed(a, b, p, v)
        out.append(OracleResult("upsilon2_closed", prm, closed, upsilon_oracle(2, a, b, p, v)[0], 1e-6))
        out.append(OracleResult("upsilon_series_h2", prm, upsilon_series(2, a, b, p, v), closed, 1e-6))
    for nu, e2, e1, f2, f1 in V_POINTS:
        prm = {"nu": nu, "eta2": e2, "eta1": e1, "phi2": f2, "phi1": f1, "damping": 0.05}
        lhs, rhs = v_compose(nu, e2, e1, f2 - 0.05j, f1 - 0.05j)
        out.append(OracleResult("v_compose", prm, rhs, lhs, 1e-5))
    for n, ell, b, r2, r1, t2, t1 in KHAT_POINTS:
        prm = {"n": n, "ell": ell, "b": b, "r2": r2, "r1": r1, "tau2": t2, "tau1": t1, "damping": 0.05}
        res = khat_compose_check(n, ell, b, r2, r1, t2, t1)
        rhs = complex(radial_khat(n, ell, b, r2, r1, (t2 + t1) * (1 - 0.05j)))
        out.append(OracleResult("khat_compose", prm, rhs, rhs * (1 + res), 1e-4))
    return out
