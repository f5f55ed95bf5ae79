"""Verification suites behind ``propload verify``.

Each suite returns a list of :class:`Check` records comparing a computed
value against an independent reference (quadrature, a second algorithm, a
classical identity or a dense-matrix oracle).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from . import specfun as sf

__all__ = ["Check", "SUITES", "run_suite", "summarize"]


@dataclass(frozen=True)
class Check:
    """One comparison: ``err <= tol`` passes."""

    suite: str
    name: str
    err: float
    tol: float
    params: dict = field(default_factory=dict)
    value: object = None
    reference: object = None

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.err) and self.err <= self.tol)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v

        return {
            "suite": self.suite,
            "name": self.name,
            "params": {k: enc(v) for k, v in self.params.items()},
            "value": enc(self.value),
            "reference": enc(self.reference),
            "err": float(self.err),
            "tol": self.tol,
            "pass": self.passed,
        }


def _rel(a, b) -> float:
    return float(abs(a - b) / max(1.0, abs(b)))


def _cquad(f, a, b, **kw) -> complex:
    re = integrate.quad(lambda s: complex(f(s)).real, a, b, limit=400, **kw)[0]
    im = integrate.quad(lambda s: complex(f(s)).imag, a, b, limit=400, **kw)[0]
    return complex(re, im)


# special functions -------------------------------------------------------------

def _hyp2f1_series_oracle(a, b, c, z, n=4000) -> float:
    s, term = 0.0, 1.0
    for k in range(n):
        s += term
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        if abs(term) < 1e-18 * abs(s):
            break
    return s


def suite_specfun() -> list[Check]:
    with warnings.catch_warnings():
        # quad flags roundoff when asked for 1e-15; the oracle is still far below tolerance
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _specfun_checks()


def _specfun_checks() -> list[Check]:
    S = "specfun"
    out = []

    def add(name, val, ref, tol, rel=True, **params):
        err = _rel(val, ref) if rel else float(abs(val - ref))
        out.append(Check(S, name, err, tol, params, complex(val) if np.iscomplexobj(val) else float(np.real(val)),
                         complex(ref) if np.iscomplexobj(ref) else float(np.real(ref))))

    # erf against its defining integral
    q = 2 / math.sqrt(math.pi) * integrate.quad(lambda s: math.exp(-s * s), 0, 1, epsabs=1e-15, epsrel=1e-15)[0]
    add("erf_quadrature", complex(sf.erf_complex(1.0)).real, q, 1e-12, z=1.0)
    z = 1.5 + 2.0j
    q = 2 / math.sqrt(math.pi) * _cquad(lambda s: z * np.exp(-(z * s) ** 2), 0, 1, epsabs=1e-14, epsrel=1e-13)
    add("erf_complex_quadrature", complex(sf.erf_complex(z)), q, 1e-10, z=str(z))
    x = 0.7
    q = 2 / math.sqrt(math.pi) * integrate.quad(lambda s: math.exp(s * s), 0, x, epsabs=1e-15, epsrel=1e-15)[0]
    add("erfi_quadrature", complex(sf.erfi(x)).real, q, 1e-12, x=x)

    # confluent hypergeometric
    for z in (2.5, -3.0 + 2.0j, 12.0):
        add("hyp1f1_exp", complex(sf.hyp1f1(1.0, 1.0, z)), complex(np.exp(z)), 1e-12, z=str(z))
    x = 1.3
    add("hyp1f1_erf", complex(sf.hyp1f1(0.5, 1.5, -x * x)).real,
        math.sqrt(math.pi) * math.erf(x) / (2 * x), 1e-12, x=x)
    for a, b, z in ((0.7, 1.9, -40 + 5j), (0.3, 1.4, 25.0), (1.2, 2.5, -8 - 3j)):
        # Euler integral for Re b > Re a > 0
        pref = math.exp(gammaln(b) - gammaln(a) - gammaln(b - a))
        ref = pref * _cquad(lambda s: np.exp(z * s) * s ** (a - 1) * (1 - s) ** (b - a - 1), 0, 1,
                            epsabs=0, epsrel=1e-12)
        add("hyp1f1_euler_integral", complex(sf.hyp1f1(a, b, z)), ref, 1e-9, a=a, b=b, z=str(z))

    # Gauss hypergeometric
    z = 0.5
    add("hyp2f1_log", complex(sf.hyp2f1(1.0, 1.0, 2.0, z)).real, -math.log(1 - z) / z, 1e-12, z=z)
    # 2F1(a, a+1/2; 3/2; u^2) = ((1+u)^(1-2a) - (1-u)^(1-2a)) / (2u(1-2a)), here a=1/4, u=0.6
    u = 0.6
    ref = ((1 + u) ** 0.5 - (1 - u) ** 0.5) / (2 * u * 0.5)
    add("hyp2f1_quadratic", complex(sf.hyp2f1(0.25, 0.75, 1.5, u * u)).real, ref, 1e-12, z=u * u)
    add("hyp2f1_series", complex(sf.hyp2f1(0.25, 0.75, 1.5, 0.36)).real,
        _hyp2f1_series_oracle(0.25, 0.75, 1.5, 0.36), 1e-12, z=0.36)

    # Bessel
    add("bessel_i_half", complex(sf.bessel_i(0.5, 0.5)).real,
        math.sqrt(2 / (math.pi * 0.5)) * math.sinh(0.5), 1e-12, nu=0.5, z=0.5)
    for nu, z in ((0.75, 1.3), (1.5, 2.0 - 1.0j), (0.3 + 0.4j, 2.5)):
        lhs = complex(sf.bessel_i(nu - 1, z) - sf.bessel_i(nu + 1, z))
        rhs = complex(2 * nu / z * sf.bessel_i(nu, z))
        add("bessel_i_recurrence", lhs, rhs, 1e-10, nu=str(nu), z=str(z))
    nu, z = 1.25, 3.0
    ref = integrate.quad(lambda th: math.exp(z * math.cos(th)) * math.cos(nu * th), 0, math.pi, epsabs=1e-14)[0] / math.pi
    ref -= math.sin(nu * math.pi) / math.pi * integrate.quad(
        lambda s: math.exp(-z * math.cosh(s) - nu * s), 0, 30.0, epsabs=1e-14)[0]
    add("bessel_i_integral", complex(sf.bessel_i(nu, z)).real, ref, 1e-10, nu=nu, z=z)

    # Airy
    zeros = sf.airy_zeros(6)
    listed = (-2.33811, -4.08795, -5.52056, -6.78671, -7.94413, -9.02265)
    for i, (a, b) in enumerate(zip(zeros, listed)):
        add(f"airy_zero_{i + 1}", float(a), b, 1e-4, rel=False)
    h = 1e-2
    for x in (-3.0, -0.5, 1.2):
        f = [float(sf.airy_ai(x + k * h)) for k in (-2, -1, 0, 1, 2)]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        add("airy_ode_residual", d2, x * f[2], 1e-8, rel=False, x=x)

    # orthogonal polynomials
    x = 0.37
    for n, ref in ((0, 1.0), (1, 2 * x), (2, 4 * x * x - 2), (3, 8 * x**3 - 12 * x), (4, 16 * x**4 - 48 * x * x + 12)):
        add(f"hermite_{n}", float(sf.hermite(n, x)), ref, 1e-13, x=x)
    x = 0.4
    add("legendre_3_vs_jacobi", float(sf.legendre(3, x)), 0.5 * (5 * x**3 - 3 * x), 1e-13, x=x)
    add("gegenbauer_half_vs_legendre", float(sf.gegenbauer(3, 0.5, x)), float(sf.jacobi(3, 0.0, 0.0, x)), 1e-13, x=x)
    alpha = 0.75
    for m, n in ((1, 1), (2, 3), (4, 4)):
        val = integrate.quad(lambda s: s**alpha * math.exp(-s) * float(sf.laguerre(m, alpha, s))
                             * float(sf.laguerre(n, alpha, s)), 0, np.inf, epsabs=1e-13)[0]
        ref = math.exp(gammaln(n + alpha + 1) - gammaln(n + 1)) if m == n else 0.0
        add("laguerre_orthogonality", val, ref, 1e-9, m=m, n=n, alpha=alpha)

    try:
        import mpmath as mp
    except ImportError:
        return out
    mp.mp.dps = 30
    for a, b, z in ((0.5, 1.5, -4.0), (1.3, 2.2, 3 - 4j), (-0.5, 0.75, 10.0)):
        add("hyp1f1_mpmath", complex(sf.hyp1f1(a, b, z)), complex(mp.hyp1f1(a, b, z)), 1e-10, a=a, b=b, z=str(z))
    for nu, z in ((0.5 + 0.5j, 3.0), (2.25, 1.5 + 2j)):
        add("bessel_i_mpmath", complex(sf.bessel_i(nu, z)), complex(mp.besseli(nu, z)), 1e-10, nu=str(nu), z=str(z))
    return out


# appendix -----------------------------------------------------------------------

def suite_appendix() -> list[Check]:
    from .pathint import appendix_report

    out = []
    for r in appendix_report():
        out.append(Check("appendix", r.name, r.rel_err, r.tol, dict(r.params), r.closed, r.oracle))
    return out


# Trotter and fast-forward --------------------------------------------------------

TROTTER_CASES = {
    "harmonic": {"N": 6, "L": 5.0, "support": "symmetric", "potential": {"kind": "harmonic", "omega": 1.0},
                 "centre": 1.0, "width": 1.0, "t": 1.0},
    "radial": {"N": 6, "L": 5.0, "support": "positive", "potential": {"kind": "radial", "omega": 0.5, "lam": 0.75},
               "centre": 4.0, "width": 0.5, "t": 1.0},
}


def trotter_errors(case: dict, eps_list=(1e-2, 2.5e-3, 1e-3, 2.5e-4)) -> dict:
    """Global 2-norm error of Trotter evolution against the dense propagator."""
    from .evolve import evolve_dense, evolve_trotter
    from .gridpdf import Grid
    from .hamiltonian import PotentialSpec, build_hamiltonian

    g = Grid(case["N"], case["L"], case["support"])
    H = build_hamiltonian(PotentialSpec.from_dict(case["potential"]), g)
    p = np.exp(-case["width"] * (g.x - case["centre"]) ** 2).astype(complex)
    p /= np.linalg.norm(p)
    ref = evolve_dense(p, H, case["t"])
    return {e: float(np.linalg.norm(evolve_trotter(p, H, case["t"], e) - ref)) for e in eps_list}


def suite_trotter() -> list[Check]:
    from .evolve import evolve_dense, fastforward_qho
    from .gridpdf import Grid
    from .hamiltonian import PotentialSpec, build_hamiltonian

    out = []
    for name, case in TROTTER_CASES.items():
        errs = trotter_errors(case)
        for eps in (1e-2, 1e-3):
            out.append(Check("trotter", f"{name}_error", errs[eps], 3 * eps, {"eps": eps}, errs[eps], 3 * eps))
            ratio = errs[eps] / errs[eps / 4]
            # ratio must lie in [3, 5]; encoded as distance from 4
            out.append(Check("trotter", f"{name}_ratio", abs(ratio - 4), 1.0, {"eps": eps}, ratio, 4.0))
    g = Grid(8, 6.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    p = np.exp(-(g.x - 1) ** 2).astype(complex)
    p /= np.linalg.norm(p)
    for t in (0.3, 0.8, 1.25):
        f = float(abs(np.vdot(fastforward_qho(p, t, g), evolve_dense(p, H, t))) ** 2)
        out.append(Check("trotter", "fastforward_fidelity", 1 - f, 1e-6, {"t": t}, f, 1.0))
    return out


# ladders -------------------------------------------------------------------------

def suite_ladder() -> list[Check]:
    from .gridpdf import Grid, TargetPdf, amplitude_encode
    from .ladder import LadderSpec, ladder_for_pdf, ladder_state, monotone_ladder_circuit

    out = []
    worst_count, worst_margin = 0, math.inf
    for N in range(2, 11):
        for k in range(1, N):
            # log tan(theta_i) = 0.01 * 2.1^(k-i) meets cot(theta_i) < cot(theta_{i+1})^2
            angles = tuple(math.atan(math.exp(0.01 * 2.1 ** (k - 1 - i))) for i in range(k))
            spec = LadderSpec(k, N, angles=angles)
            c = monotone_ladder_circuit(spec)
            worst_count = max(worst_count, abs(len(c) - (N + 3 * k)))
            amps = c.run().amps.real.reshape(2, 2**k, -1)
            worst_margin = min(worst_margin, float(np.min(np.diff(amps[0, :, 0]))),
                               float(np.min(-np.diff(amps[1, :, 0]))))
    out.append(Check("ladder", "gate_count", float(worst_count), 0.0, {"N_max": 10}, worst_count, 0))
    # margin > 1e-12 encoded as 1e-12 / margin <= 1
    out.append(Check("ladder", "monotone_margin", 1e-12 / worst_margin if worst_margin > 0 else math.inf, 1.0,
                     {"N_max": 10}, worst_margin, 1e-12))
    g = Grid(10, 5.0)
    target = TargetPdf("normal", (0.0, 1.0))
    pref = amplitude_encode(target, g, "density").state.amps
    for eps in (0.1, 0.05):
        spec = ladder_for_pdf(target, g, eps)
        err = float(np.linalg.norm(ladder_state(spec).amps - pref))
        out.append(Check("ladder", "pdf_ladder_error", err, eps, {"eps": eps, "k": spec.k}, err, eps))
    return out


# analytic identities -----------------------------------------------------------------

MEHLER_TERMS = 40
HARDY_HILLE_TERMS = 30


def mehler_error(x, y, z, terms: int = MEHLER_TERMS) -> float:
    s = 0.0
    for n in range(terms):
        s += (z / 2) ** n / math.factorial(n) * float(sf.hermite(n, x)) * float(sf.hermite(n, y))
    lhs = math.exp(-(x * x + y * y) / 2) * s
    rhs = (1 - z * z) ** -0.5 * math.exp((4 * x * y * z - (x * x + y * y) * (1 + z * z)) / (2 * (1 - z * z)))
    return abs(lhs - rhs)


def hardy_hille_error(x, y, z, lam, terms: int = HARDY_HILLE_TERMS) -> float:
    lhs = sum(math.exp(gammaln(n + 1) - gammaln(n + lam + 1)) * float(sf.laguerre(n, lam, x))
              * float(sf.laguerre(n, lam, y)) * z**n for n in range(terms))
    arg = 2 * math.sqrt(x * y * z) / (1 - z)
    rhs = (math.exp(-(x + y) * z / (1 - z)) / (1 - z) * (x * y * z) ** (-lam / 2)
           * complex(sf.bessel_i(lam, arg)).real)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def composition_error(kernel, t1: complex, t2: complex, x: float, z: float, cut: float = 60.0) -> float:
    """``|int K(x,y;t2) K(y,z;t1) dy - K(x,z;t1+t2)|`` relative to the right side."""

    def f(y):
        return complex(kernel(x, y, t2) * kernel(y, z, t1))

    lhs = _cquad(f, -cut, cut, epsabs=1e-13, epsrel=1e-11)
    rhs = complex(kernel(x, z, t1 + t2))
    return abs(lhs - rhs) / abs(rhs)


def suite_identities() -> list[Check]:
    from .analytic import EigenSystem, InitialState, Kernel, closed_form, evolve_eigenbasis, probability_mass
    from .pathint import radial_khat

    S = "identities"
    out = []
    grid = np.linspace(-2, 2, 9)
    zs = np.linspace(-0.7, 0.7, 15)
    worst = max(mehler_error(x, y, z) for x in grid for y in grid for z in zs)
    out.append(Check(S, "mehler", worst, 1e-8, {"terms": MEHLER_TERMS, "z_max": 0.7, "xy_max": 2.0}, worst, 0.0))
    conv = max(mehler_error(x, y, z, 60) for x in grid for y in grid for z in (-0.7, 0.7))
    out.append(Check(S, "mehler_converged", conv, 1e-8, {"terms": 60, "z_max": 0.7, "xy_max": 2.0}, conv, 0.0))

    worst = max(hardy_hille_error(x, y, z, lam) for lam in (0.0, 0.75, 1.5, 2.5) for z in (0.1, 0.3, 0.5)
                for x in (0.2, 1.0, 2.5, 4.0) for y in (0.5, 1.5, 3.0))
    out.append(Check(S, "hardy_hille", worst, 1e-6, {"terms": HARDY_HILLE_TERMS, "z_max": 0.5}, worst, 0.0))

    a = np.linspace(-3, 3, 7)[:, None]
    b = np.linspace(-3, 3, 7)[None, :]
    free = Kernel("free")
    harm = Kernel("harmonic", {"omega": 1e-4})
    d = float(np.max(np.abs(harm(a, b, 1.0) - free(a, b, 1.0))))
    out.append(Check(S, "omega_to_zero_harmonic", d, 1e-6, {"omega": 1e-4, "t": 1.0}, d, 0.0))
    a = np.linspace(0.3, 3, 6)[:, None]
    b = np.linspace(0.3, 3, 6)[None, :]
    half = Kernel("halfline")
    d = float(np.max(np.abs(Kernel("radial", {"omega": 1e-4, "lam": 0.5})(a, b, 1.0) - half(a, b, 1.0))))
    out.append(Check(S, "omega_to_zero_radial", d, 1e-6, {"omega": 1e-4, "lam": 0.5, "t": 1.0}, d, 0.0))
    d = float(np.max(np.abs(radial_khat(1, 0, 0.0, a, b, 1.0, omega=1e-4) - half(a, b, 1.0))))
    out.append(Check(S, "omega_to_zero_khat", d, 1e-6, {"omega": 1e-4, "n": 1, "ell": 0}, d, 0.0))

    for kern in (Kernel("free"), Kernel("harmonic", {"omega": 1.0})):
        for t1, t2, x, z in ((0.3, 0.5, 0.4, -0.7), (0.6, 0.9, -1.1, 0.8)):
            e = composition_error(kern, t1 * (1 - 0.05j), t2 * (1 - 0.05j), x, z)
            out.append(Check(S, f"composition_{kern.kind}", e, 1e-6,
                             {"t1": t1, "t2": t2, "damping": 0.05, "x": x, "z": z}, e, 0.0))

    x = np.linspace(-15, 15, 3001)
    e = abs(1 - probability_mass(closed_form(Kernel("free"), InitialState("gausspow", {"a": 1, "b": 1}), 3.0, x), x))
    out.append(Check(S, "probability_free", e, 2e-3, {"t": 3.0}, e, 0.0))
    x = np.linspace(0, 10, 2001)[1:]
    e = abs(1 - probability_mass(closed_form(Kernel("halfline"), InitialState("gausspow_half", {"a": 1, "b": 2}),
                                             math.sqrt(3) / 2, x), x))
    out.append(Check(S, "probability_halfline", e, 2e-3, {"t": math.sqrt(3) / 2}, e, 0.0))
    x = np.linspace(-10, 10, 2001)
    e = abs(1 - probability_mass(closed_form(Kernel("harmonic", {"omega": 1.0}), InitialState("gaussshift", {"x0": 1.0}),
                                             0.7, x), x))
    out.append(Check(S, "probability_harmonic", e, 2e-3, {"t": 0.7}, e, 0.0))
    x = np.linspace(0, 12, 2401)[1:]
    e = abs(1 - probability_mass(closed_form(Kernel("radial", {"omega": 1.0, "lam": 0.75}),
                                             InitialState("gausspow_half", {"a": 1, "b": 2}), 0.6, x), x))
    out.append(Check(S, "probability_radial", e, 2e-3, {"t": 0.6, "lam": 0.75}, e, 0.0))
    x = np.linspace(0, 30, 3001)[1:]
    es = EigenSystem("halflinear", {"k": 1.0})
    e = abs(1 - probability_mass(evolve_eigenbasis(es, InitialState("gamma", {"a": 1, "b": 2}), 1.0, x, 40), x))
    out.append(Check(S, "probability_halflinear", e, 2e-3, {"t": 1.0, "M": 40}, e, 0.0))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "specfun": suite_specfun,
    "appendix": suite_appendix,
    "trotter": suite_trotter,
    "ladder": suite_ladder,
    "identities": suite_identities,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()


def summarize(checks: list[Check]) -> str:
    """Fixed-width pass/fail table."""
    lines = [f"{'status':6} {'suite':10} {'name':30} {'err':>10} {'tol':>10}"]
    for c in checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL':6} {c.suite:10} {c.name:30} {c.err:10.3e} {c.tol:10.1e}")
    n = sum(c.passed for c in checks)
    lines.append(f"{n}/{len(checks)} passed")
    return "\n".join(lines)
