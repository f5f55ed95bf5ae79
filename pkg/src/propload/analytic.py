"""Closed-form propagators, initial states and reference evolutions.

Three engines produce ``Psi(x, t)`` on a set of points:

* :func:`evolve_quadrature` integrates ``K(x, y; t) Psi(y, 0)`` numerically;
* :func:`closed_form` evaluates a known analytic result for a (kernel, state) pair;
* :func:`evolve_eigenbasis` sums ``c_n psi_n(x) exp(-i E_n t / hbar)`` for
  potentials whose stationary states are known.

Units default to ``hbar = m = 1``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special as sp
from scipy.interpolate import CubicSpline

from .gridpdf import Grid
from .hamiltonian import PotentialSpec
from .specfun import (
    SpecfunError,
    airy_ai,
    airy_ai_prime,
    airy_zeros,
    bessel_i,
    erf_complex,
    hyp1f1,
    jacobi,
    laguerre,
)

__all__ = [
    "Kernel",
    "InitialState",
    "EigenSystem",
    "QuadratureError",
    "CausticError",
    "KERNEL_KINDS",
    "INITIAL_KINDS",
    "gauss_moment",
    "gauss_moment_full",
    "evolve_quadrature",
    "closed_form",
    "evolve_eigenbasis",
    "upsilon_lemma",
    "upsilon_quadrature",
    "upsilon_beta_series",
    "delta_bound_state",
    "probability_mass",
]

CAUSTIC_GAP = 1e-3
TAIL_CUT = 1e-12


class QuadratureError(RuntimeError):
    """Adaptive quadrature missed its tolerance; ``achieved`` holds the estimate."""

    def __init__(self, msg, achieved=float("nan")):
        super().__init__(msg)
        self.achieved = achieved


class CausticError(ValueError):
    """Kernel evaluated too close to a time where ``sin(omega t) = 0``."""


def _points(x) -> np.ndarray:
    return x.x if isinstance(x, Grid) else np.asarray(x, dtype=float)


# kernels ---------------------------------------------------------------------

KERNEL_KINDS = {
    "free": (),
    "halfline": (),
    "box": ("b",),
    "harmonic": ("omega",),
    "radial": ("omega", "lam"),
    "linear": ("k",),
}


@dataclass(frozen=True)
class Kernel:
    """Propagator ``K(x, y; t)`` of one of the solvable potentials.

    ``free`` and ``halfline`` are the zero potential on the line and on
    ``x > 0``; ``box`` is the zero potential on ``(-b, b)``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    hbar: float = 1.0
    m: float = 1.0
    n_terms: int = 200

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        missing = [p for p in KERNEL_KINDS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind} kernel needs {missing}")

    @classmethod
    def from_potential(cls, spec: PotentialSpec, half_line: bool = False, box: float | None = None) -> "Kernel":
        if spec.kind == "zero":
            if box is not None:
                return cls("box", {"b": box}, spec.hbar, spec.m)
            return cls("halfline" if half_line else "free", {}, spec.hbar, spec.m)
        if spec.kind in ("harmonic", "radial", "linear"):
            return cls(spec.kind, dict(spec.params), spec.hbar, spec.m)
        raise ValueError(f"no closed-form kernel for {spec.kind}; use EigenSystem")

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind in ("halfline", "radial"):
            return (0.0, math.inf)
        if self.kind == "box":
            return (-self.params["b"], self.params["b"])
        return (-math.inf, math.inf)

    def _check_time(self, t):
        """Real ``t > 0``; free and harmonic kernels also take damped times with ``Im t < 0``."""
        if isinstance(t, complex) or np.iscomplexobj(t):
            t = complex(t)
            if self.kind not in ("free", "harmonic") or not (t.real > 0 and t.imag <= 0):
                raise ValueError("complex time needs a free or harmonic kernel, Re t > 0 and Im t <= 0")
            if self.kind == "harmonic" and self.params["omega"] * t.real >= math.pi - CAUSTIC_GAP:
                raise ValueError("complex time only supported before the first caustic")
            return
        if not t > 0:
            raise ValueError("kernel needs t > 0")
        if self.kind in ("harmonic", "radial"):
            # t -> 0 is the identity limit, not a focal point
            wt = self.params["omega"] * t
            j = round(wt / math.pi)
            if j >= 1 and abs(wt - math.pi * j) < CAUSTIC_GAP:
                raise CausticError(f"omega t = {wt:.6g} is within {CAUSTIC_GAP} of a caustic")

    def __call__(self, x, y, t: float):
        self._check_time(t)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        hb, m = self.hbar, self.m
        k = self.kind
        if k == "free":
            return _free(x - y, t, hb, m)
        if k == "halfline":
            return _free(x - y, t, hb, m) - _free(x + y, t, hb, m)
        if k == "linear":
            f = self.params["k"]
            pref = np.sqrt(m / (2j * math.pi * hb * t))
            ph = m * (x - y) ** 2 / (2 * t) - f * t * (x + y) / 2 - f**2 * t**3 / (24 * m)
            return pref * np.exp(1j * ph / hb)
        if k == "harmonic":
            w = self.params["omega"]
            if isinstance(t, complex):
                s, c = cmath.sin(w * t), cmath.cos(w * t)
                pref = np.sqrt(m * w / (2j * math.pi * hb * s))
            else:
                s, c = math.sin(w * t), math.cos(w * t)
                maslov = math.floor(w * t / math.pi)
                pref = math.sqrt(m * w / (2 * math.pi * hb * abs(s))) * np.exp(-1j * math.pi * (0.25 + 0.5 * maslov))
            return pref * np.exp(1j * m * w / (2 * hb * s) * ((x**2 + y**2) * c - 2 * x * y))
        if k == "radial":
            return _radial_kernel(x, y, t, self.params["omega"], self.params["lam"], hb, m)
        # box
        b = self.params["b"]
        n = np.arange(1, self.n_terms + 1)
        xs = np.expand_dims(x, -1)
        ys = np.expand_dims(y, -1)
        terms = (np.sin(np.pi * n * (xs + b) / (2 * b)) * np.sin(np.pi * n * (ys + b) / (2 * b))
                 * np.exp(-1j * hb * t * np.pi**2 * n**2 / (8 * m * b**2)))
        inside = (np.abs(x) < b) & (np.abs(y) < b)
        return np.where(inside, terms.sum(axis=-1) / b, 0.0)


def _free(d, t, hb, m):
    return np.sqrt(m / (2j * math.pi * hb * t)) * np.exp(1j * m * d**2 / (2 * hb * t))


def _radial_kernel(x, y, t, w, lam, hb, m):
    # K(t + pi/omega) = exp(-i pi (lam + 1)) K(t), since E_n = hbar omega (2n + lam + 1)
    period = math.pi / w
    wraps = math.floor(t / period)
    tr = t - wraps * period
    s, c = math.sin(w * tr), math.cos(w * tr)
    z = m * w * x * y / (1j * hb * s)
    val = (m * w * np.sqrt(x * y) / (1j * hb * s)
           * np.exp(-m * w / (2j * hb) * (x**2 + y**2) * c / s)
           * np.asarray(bessel_i(lam, z)))
    return val * np.exp(-1j * math.pi * (lam + 1) * wraps)


# initial states --------------------------------------------------------------

FOUR_LEVEL_BLOCKS = ((-2.0, -1.0, 0.25), (-1.0, 1.0, math.sqrt(7) / 4), (1.0, 2.0, 0.25))
PLATEAU_BLOCKS = ((-1.0, 1.0, 1 / math.sqrt(2)),)

INITIAL_KINDS = {
    "gausspow": ("a", "b"),
    "gausspow_half": ("a", "b"),
    "gamma": ("a", "b"),
    "plateau": (),
    "fourlevel": (),
    "blocks": ("blocks",),
    "truncgauss": ("b",),
    "triangular": ("a",),
    "sinepi": (),
    "coulombgamma": (),
    "gaussshift": ("x0",),
    "deltabound": ("a",),
}


@dataclass(frozen=True)
class InitialState:
    """Normalized ``Psi(y, 0)``.

    gausspow
        ``N e^{-a y^2} y^(b-1)`` on the line (integer ``b >= 1``).
    gausspow_half
        same shape on ``y > 0`` (``b > 1/2``).
    gamma
        ``sqrt((2a)^(2b-1) / Gamma(2b-1)) e^{-a y} y^(b-1)`` on ``y > 0``.
    plateau, fourlevel, blocks
        piecewise constant with ``(lo, hi, height)`` blocks.
    truncgauss
        ``e^{-y^2}`` restricted to ``(-b, b)``.
    triangular
        tent on ``[0, a]`` peaking at ``a/2``.
    sinepi
        ``sin(pi y)`` on ``(0, pi/2)``.
    coulombgamma
        ``(2/sqrt3) y^2 e^{-y}`` on ``y > 0``.
    gaussshift
        oscillator ground state displaced to ``x0`` (``omega``, ``m``, ``hbar`` optional).
    deltabound
        ``sqrt(m a)/hbar e^{-m a |y| / hbar^2}``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    check_norm: bool = True

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ValueError(f"unknown initial state {self.kind!r}")
        missing = [p for p in INITIAL_KINDS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind} needs {missing}")
        p = self.params
        if self.kind in ("gausspow", "gausspow_half", "gamma"):
            if not p["a"] > 0 or not p["b"] > 0.5:
                raise ValueError("need a > 0 and b > 1/2")
            if self.kind == "gausspow" and p["b"] != int(p["b"]):
                raise ValueError("gausspow on the full line needs integer b")
        if self.check_norm:
            nrm = self.norm2()
            if abs(nrm - 1) > 1e-8:
                raise ValueError(f"initial state norm {nrm:.12g} differs from 1")

    # shape data
    @property
    def blocks(self) -> tuple:
        if self.kind == "plateau":
            return PLATEAU_BLOCKS
        if self.kind == "fourlevel":
            return FOUR_LEVEL_BLOCKS
        if self.kind == "blocks":
            return tuple(tuple(map(float, b)) for b in self.params["blocks"])
        return ()

    @property
    def support(self) -> tuple[float, float]:
        k, p = self.kind, self.params
        if self.blocks:
            return (self.blocks[0][0], self.blocks[-1][1])
        if k in ("gausspow_half", "gamma", "coulombgamma"):
            return (0.0, math.inf)
        if k == "truncgauss":
            return (-p["b"], p["b"])
        if k == "triangular":
            return (0.0, p["a"])
        if k == "sinepi":
            return (0.0, math.pi / 2)
        return (-math.inf, math.inf)

    @property
    def breaks(self) -> tuple[float, ...]:
        if self.blocks:
            return tuple(sorted({e for b in self.blocks for e in b[:2]}))
        if self.kind == "triangular":
            return (0.0, self.params["a"] / 2, self.params["a"])
        if self.kind in ("gaussshift",):
            return (float(self.params["x0"]),)
        if self.kind == "deltabound":
            return (0.0,)
        lo, hi = self.support
        return tuple(v for v in (lo, hi) if math.isfinite(v))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        k, p = self.kind, self.params
        if self.blocks:
            out = np.zeros_like(y)
            for lo, hi, h in self.blocks:
                out = np.where((y > lo) & (y <= hi), h, out)
            return out
        if k == "gausspow":
            a, b = p["a"], int(p["b"])
            norm = math.sqrt(2 ** (b + 0.5) * a ** (b - 0.5) / (2 * math.gamma(b - 0.5)))
            return norm * np.exp(-a * y**2) * y ** (b - 1)
        if k == "gausspow_half":
            a, b = p["a"], p["b"]
            norm = math.sqrt(2 ** (b + 0.5) * a ** (b - 0.5) / math.gamma(b - 0.5))
            yp = np.where(y > 0, y, 0.0)
            return np.where(y > 0, norm * np.exp(-a * yp**2) * yp ** (b - 1), 0.0)
        if k == "gamma":
            a, b = p["a"], p["b"]
            norm = math.sqrt((2 * a) ** (2 * b - 1) / math.gamma(2 * b - 1))
            yp = np.where(y > 0, y, 0.0)
            return np.where(y > 0, norm * np.exp(-a * yp) * yp ** (b - 1), 0.0)
        if k == "truncgauss":
            b = p["b"]
            norm = (2 / math.pi) ** 0.25 / math.sqrt(math.erf(math.sqrt(2) * b))
            return np.where(np.abs(y) < b, norm * np.exp(-(y**2)), 0.0)
        if k == "triangular":
            a = p["a"]
            c = 2 * math.sqrt(3) / a**1.5
            return np.where((y >= 0) & (y <= a), c * np.where(y <= a / 2, y, a - y), 0.0)
        if k == "sinepi":
            c = 2 * math.sqrt(math.pi / (math.pi**2 - math.sin(math.pi**2)))
            return np.where((y > 0) & (y < math.pi / 2), c * np.sin(math.pi * y), 0.0)
        if k == "coulombgamma":
            yp = np.where(y > 0, y, 0.0)
            return np.where(y > 0, 2 / math.sqrt(3) * yp**2 * np.exp(-yp), 0.0)
        if k == "gaussshift":
            kap = self.kappa
            return (kap / math.pi) ** 0.25 * np.exp(-kap * (y - p["x0"]) ** 2 / 2)
        # deltabound
        m, hb = p.get("m", 1.0), p.get("hbar", 1.0)
        return math.sqrt(m * p["a"]) / hb * np.exp(-m * p["a"] * np.abs(y) / hb**2)

    @property
    def kappa(self) -> float:
        p = self.params
        return p.get("m", 1.0) * p.get("omega", 1.0) / p.get("hbar", 1.0)

    def effective_support(self, tol: float = TAIL_CUT) -> tuple[float, float]:
        """Finite interval outside which ``|Psi| < tol``."""
        lo, hi = self.support
        if math.isfinite(lo) and math.isfinite(hi):
            return lo, hi

        def reach(start, direction):
            step, pos = 0.25, start
            for _ in range(4000):
                nxt = pos + direction * step
                if abs(self(nxt)) < tol and abs(self(nxt + direction * step)) < tol:
                    return nxt
                pos = nxt
                step = min(step * 1.05, 2.0)
            return pos

        centre = self.params.get("x0", 0.0) if self.kind == "gaussshift" else (lo if math.isfinite(lo) else 0.0)
        if self.kind in ("gamma", "coulombgamma", "gausspow_half"):
            centre = 0.0
        new_lo = lo if math.isfinite(lo) else reach(centre, -1)
        new_hi = hi if math.isfinite(hi) else reach(centre, +1)
        return new_lo, new_hi

    def norm2(self) -> float:
        lo, hi = self.effective_support(1e-17)
        pts = [b for b in self.breaks if lo < b < hi]
        edges = [lo, *pts, hi]
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            total += integrate.quad(lambda y: float(abs(self(y)) ** 2), a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
        return total


# Gaussian moments ------------------------------------------------------------

def gauss_moment(A, B, s):
    """``int_0^inf y^(s-1) exp(-A y^2 - B y) dy`` for ``Re A >= 0`` (vectorized over ``B``).

    Uses the Mellin-transform form
    ``(1/2) A^(-s/2-1/2) [sqrt(A) G(s/2) 1F1(s/2; 1/2; z) - B G((s+1)/2) 1F1((s+1)/2; 3/2; z)]``
    with ``z = B^2 / (4A)``.
    """
    A = complex(A)
    B = np.asarray(B, dtype=complex)
    z = B**2 / (4 * A)
    t1 = math.sqrt(math.pi) if s == 1 else sp.gamma(s / 2)
    t1 = np.sqrt(A) * t1 * np.asarray(hyp1f1(s / 2, 0.5, z))
    t2 = B * sp.gamma((s + 1) / 2) * np.asarray(hyp1f1((s + 1) / 2, 1.5, z))
    return 0.5 * A ** (-s / 2 - 0.5) * (t1 - t2)


def gauss_moment_full(A, B, n: int):
    """``int_R y^n exp(-A y^2 - B y) dy`` for integer ``n >= 0``."""
    A = complex(A)
    B = np.asarray(B, dtype=complex)
    z = B**2 / (4 * A)
    if n % 2 == 0:
        return A ** (-(n + 1) / 2) * sp.gamma((n + 1) / 2) * np.asarray(hyp1f1((n + 1) / 2, 0.5, z))
    return -B * A ** (-(n + 2) / 2) * sp.gamma((n + 2) / 2) * np.asarray(hyp1f1((n + 2) / 2, 1.5, z))


# engines ---------------------------------------------------------------------

OSC_PANEL_THRESHOLD = 200
GL_ORDER = 20


def _phase_rate(kernel: Kernel, xs: np.ndarray, lo: float, hi: float, t: float) -> float:
    """Upper bound on ``|d phase / dy|`` of the kernel over the integration box."""
    hb, m = kernel.hbar, kernel.m
    xm = float(np.max(np.abs(xs))) if xs.size else 0.0
    ym = max(abs(lo), abs(hi))
    k = kernel.kind
    if k in ("free", "halfline"):
        return m * (xm + ym) / (hb * t)
    if k == "linear":
        return m * (xm + ym) / (hb * t) + abs(kernel.params["k"]) * t / (2 * hb)
    if k in ("harmonic", "radial"):
        w = kernel.params["omega"]
        s, c = math.sin(w * t), math.cos(w * t)
        return m * w * (xm + abs(c) * ym) / (hb * abs(s))
    return math.pi * kernel.n_terms / (2 * kernel.params["b"])


def _panel_rule(f, edges, n_panels: int, chunk: int = 4096):
    """Composite Gauss-Legendre over ``n_panels`` panels spread over ``edges`` segments."""
    nodes, weights = np.polynomial.legendre.leggauss(GL_ORDER)
    lengths = np.diff(edges)
    per = np.maximum(1, np.ceil(n_panels * lengths / lengths.sum()).astype(int))
    bounds = np.concatenate([np.linspace(a, b, n + 1)[:-1] for a, b, n in zip(edges, edges[1:], per)] + [[edges[-1]]])
    a, b = bounds[:-1], bounds[1:]
    total = None
    for i in range(0, a.size, chunk):
        aa, bb = a[i:i + chunk, None], b[i:i + chunk, None]
        y = (0.5 * (bb - aa) * nodes + 0.5 * (bb + aa)).ravel()
        w = (0.5 * (bb - aa) * weights).ravel()
        part = f(y) @ w
        total = part if total is None else total + part
    return total


def evolve_quadrature(kernel: Kernel, psi0: InitialState, t: float, x, epsabs: float = 1e-10,
                      epsrel: float = 1e-8, limit: int = 20000) -> np.ndarray:
    """``Psi(x, t) = int K(x, y; t) Psi(y, 0) dy`` by quadrature.

    The integration range is the overlap of the kernel domain and the set
    where ``|Psi(y, 0)| >= 1e-12``; discontinuities of ``Psi`` are breakpoints.
    Moderately oscillating integrands use adaptive Gauss-Kronrod; when the
    kernel phase winds more than a few hundred times over the range, a
    composite Gauss-Legendre rule with about one panel per oscillation is used
    and checked against a rule with 1.5 times as many panels.
    """
    xs = _points(x)
    kernel._check_time(t)
    lo, hi = psi0.effective_support()
    dlo, dhi = kernel.domain
    lo, hi = max(lo, dlo), min(hi, dhi)
    if not hi > lo:
        return np.zeros(xs.shape, dtype=complex)
    pts = [b for b in psi0.breaks if lo < b < hi]
    n = xs.size
    windings = _phase_rate(kernel, xs, lo, hi, t) * (hi - lo) / (2 * math.pi)

    if windings > OSC_PANEL_THRESHOLD:
        edges = np.array([lo, *pts, hi])

        def g(y):
            return kernel(xs[:, None], y[None, :], t) * psi0(y)[None, :]

        panels = int(math.ceil(windings)) + len(edges)
        coarse = _panel_rule(g, edges, panels)
        fine = _panel_rule(g, edges, int(1.5 * panels))
        err = float(np.max(np.abs(fine - coarse))) if n else 0.0
        scale = max(float(np.max(np.abs(fine))) if n else 0.0, 1.0)
        if err > 100 * max(epsabs, epsrel * scale):
            raise QuadratureError(f"panel quadrature error estimate {err:.3g} above tolerance", err)
        return fine

    def f(y):
        v = kernel(xs, y, t) * psi0(y)
        return np.concatenate([v.real, v.imag])

    res, err = integrate.quad_vec(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit,
                                  points=pts or None, norm="max")
    out = res[:n] + 1j * res[n:]
    scale = max(float(np.max(np.abs(out))) if n else 0.0, 1.0)
    if err > 100 * max(epsabs, epsrel * scale):
        raise QuadratureError(f"quadrature error estimate {err:.3g} above tolerance", err)
    return out


def _ho_blocks(blocks, x, t, w, hb, m):
    """Oscillator evolution of a piecewise-constant state, block by block in erf form."""
    s, c = math.sin(w * t), math.cos(w * t)
    kap = m * w / hb
    maslov = math.floor(w * t / math.pi)
    pref = math.sqrt(kap / (2 * math.pi * abs(s))) * np.exp(-1j * math.pi * (0.25 + 0.5 * maslov))
    A = -1j * kap * c / (2 * s)
    B = 1j * kap * x / s
    outer = np.exp(1j * kap * c * x**2 / (2 * s))
    out = np.zeros(x.shape, dtype=complex)
    for lo, hi, h in blocks:
        if abs(A) < 1e-12:
            seg = (np.exp(-B * lo) - np.exp(-B * hi)) / B
        else:
            sa = np.sqrt(A)
            shift = B / (2 * sa)
            g = np.sqrt(np.pi) / (2 * sa) * np.exp(B**2 / (4 * A))
            seg = g * (np.asarray(erf_complex(sa * hi + shift)) - np.asarray(erf_complex(sa * lo + shift)))
        out += h * seg
    return pref * outer * out


def _box_series(x, t, b, hb, m, n_terms):
    """Truncated Gaussian in the box; the overlap integrals use the Faddeeva form of erf."""
    n = np.arange(1, n_terms + 1)
    kk = np.pi * n / (2 * b)
    # e^{-k^2/4} [erf(b - ik/2) + erf(b + ik/2)], written with w(z) = e^{-z^2} erfc(-iz)
    ov = 2 * np.exp(-(kk**2) / 4) - np.exp(-(b**2)) * (
        np.exp(-1j * b * kk) * sp.wofz(-kk / 2 + 1j * b) + np.exp(1j * b * kk) * sp.wofz(kk / 2 + 1j * b)
    )
    coef = math.sqrt(math.pi) / 2 * np.sin(np.pi * n / 2) * ov
    if np.max(np.abs(coef[-4:])) > 1e-12:
        warnings.warn("box series not converged at the requested truncation", RuntimeWarning, stacklevel=3)
    norm = (2 / math.pi) ** 0.25 / math.sqrt(math.erf(math.sqrt(2) * b)) / b
    phase = np.exp(-1j * hb * t * np.pi**2 * n**2 / (8 * m * b**2))
    modes = np.sin(np.pi * np.outer(x + b, n) / (2 * b))
    vals = norm * modes @ (phase * coef)
    return np.where(np.abs(x) < b, vals, 0.0)


def delta_bound_state(a: float, x, t: float = 0.0, hbar: float = 1.0, m: float = 1.0) -> np.ndarray:
    """Bound state of ``V = -a delta(x)``: ``sqrt(m a)/hbar e^{-m a |x|/hbar^2} e^{-iEt/hbar}``."""
    xs = _points(x)
    E = -m * a**2 / (2 * hbar**2)
    return math.sqrt(m * a) / hbar * np.exp(-m * a * np.abs(xs) / hbar**2) * np.exp(-1j * E * t / hbar)


def closed_form(kernel, psi0: InitialState | None, t: float, x) -> np.ndarray:
    """Analytic ``Psi(x, t)`` for the (kernel, initial state) pairs with known results.

    Supported pairs: harmonic with piecewise-constant or displaced-Gaussian
    states; free with ``gausspow``; halfline and radial with ``gausspow_half``;
    radial with ``gamma`` (through :func:`upsilon_lemma`); linear with
    ``gamma``; box with ``truncgauss``.  A ``delta`` :class:`PotentialSpec`
    returns its bound state and ignores ``psi0``.
    """
    xs = _points(x)
    if isinstance(kernel, PotentialSpec):
        if kernel.kind == "delta":
            return delta_bound_state(kernel.params["a"], xs, t, kernel.hbar, kernel.m)
        kernel = Kernel.from_potential(kernel)
    if psi0 is None:
        raise ValueError("closed form needs an initial state")
    kernel._check_time(t)
    k, s = kernel.kind, psi0.kind
    hb, m, p = kernel.hbar, kernel.m, psi0.params
    if k == "harmonic" and psi0.blocks:
        return _ho_blocks(psi0.blocks, xs, t, kernel.params["omega"], hb, m)
    if k == "harmonic" and s == "gaussshift":
        w = kernel.params["omega"]
        kap = m * w / hb
        if abs(psi0.kappa - kap) > 1e-12 * kap:
            raise ValueError("displaced Gaussian must be the ground-state width of this oscillator")
        x0 = p["x0"]
        wt = w * t
        ph = 0.5 * wt + kap * x0 * xs * math.sin(wt) - kap * x0**2 * math.sin(2 * wt) / 4
        return (kap / math.pi) ** 0.25 * np.exp(-kap * (xs - x0 * math.cos(wt)) ** 2 / 2 - 1j * ph)
    if k == "free" and s == "gausspow":
        a, b = p["a"], int(p["b"])
        norm = math.sqrt(2 ** (b + 0.5) * a ** (b - 0.5) / (2 * math.gamma(b - 0.5)))
        A = a - 1j * m / (2 * hb * t)
        B = 1j * m * xs / (hb * t)
        pref = np.sqrt(m / (2j * math.pi * hb * t)) * np.exp(1j * m * xs**2 / (2 * hb * t))
        return pref * norm * gauss_moment_full(A, B, b - 1)
    if k == "halfline" and s == "gausspow_half":
        a, b = p["a"], p["b"]
        norm = math.sqrt(2 ** (b + 0.5) * a ** (b - 0.5) / math.gamma(b - 0.5))
        A = a - 1j * m / (2 * hb * t)
        B = 1j * m * xs / (hb * t)
        pref = np.sqrt(m / (2j * math.pi * hb * t)) * np.exp(1j * m * xs**2 / (2 * hb * t))
        diff = -B * A ** (-b / 2 - 0.5) * sp.gamma((b + 1) / 2) * np.asarray(hyp1f1((b + 1) / 2, 1.5, B**2 / (4 * A)))
        return pref * norm * diff
    if k == "radial" and s in ("gausspow_half", "gamma"):
        return _radial_closed(kernel, psi0, t, xs)
    if k == "linear" and s == "gamma":
        a, b = p["a"], p["b"]
        f = kernel.params["k"]
        norm = math.sqrt((2 * a) ** (2 * b - 1) / math.gamma(2 * b - 1))
        A = -1j * m / (2 * hb * t)
        B = a + 1j * m * xs / (hb * t) + 1j * f * t / (2 * hb)
        ph = m * xs**2 / (2 * t) - f * t * xs / 2 - f**2 * t**3 / (24 * m)
        pref = np.sqrt(m / (2j * math.pi * hb * t)) * np.exp(1j * ph / hb)
        return pref * norm * gauss_moment(A, B, b)
    if k == "box" and s == "truncgauss":
        if abs(p["b"] - kernel.params["b"]) > 0:
            raise ValueError("box and truncated Gaussian must share b")
        return _box_series(xs, t, kernel.params["b"], hb, m, kernel.n_terms)
    raise ValueError(f"no closed form for kernel {k!r} with initial state {s!r}")


def _radial_closed(kernel: Kernel, psi0: InitialState, t: float, xs: np.ndarray) -> np.ndarray:
    w, lam = kernel.params["omega"], kernel.params["lam"]
    hb, m = kernel.hbar, kernel.m
    period = math.pi / w
    wraps = math.floor(t / period)
    tr = t - wraps * period
    s, c = math.sin(w * tr), math.cos(w * tr)
    a, b = psi0.params["a"], psi0.params["b"]
    gam = m * w * xs / (1j * hb * s)
    pref = m * w * np.sqrt(xs) / (1j * hb * s) * np.exp(-m * w * xs**2 * c / (2j * hb * s))
    alpha = m * w * c / (2j * hb * s)
    if psi0.kind == "gausspow_half":
        norm = math.sqrt(2 ** (b + 0.5) * a ** (b - 0.5) / math.gamma(b - 0.5))
        pq = a + alpha
        mu = b + 0.5
        # int_0^inf y^(mu-1) e^{-p y^2} I_lam(g y) dy
        val = (gam**lam * sp.gamma((mu + lam) / 2) / (2 ** (lam + 1) * pq ** ((mu + lam) / 2) * sp.gamma(lam + 1))
               * np.asarray(hyp1f1((mu + lam) / 2, lam + 1, gam**2 / (4 * pq))))
    else:
        norm = math.sqrt((2 * a) ** (2 * b - 1) / math.gamma(2 * b - 1))
        val = np.array([_upsilon_best(alpha, a, g, lam, b + 0.5) for g in gam])
    return pref * norm * val * np.exp(-1j * math.pi * (lam + 1) * wraps)


def _upsilon_terms(alpha, beta, gamma, lam, s, n_max, rel_tol):
    z = beta**2 / (4 * alpha)
    la = np.log(alpha)
    lg2 = np.log(gamma / 2)
    total = 0j
    biggest = 0.0
    quiet = 0
    for n in range(n_max):
        w = s + 2 * n + lam
        logc = (2 * n + lam) * lg2 - sp.gammaln(n + 1) - sp.loggamma(n + lam + 1)
        logc = logc + sp.loggamma(w / 2) - (w / 2 + 0.5) * la
        ratio = np.exp(sp.loggamma((w + 1) / 2) - sp.loggamma(w / 2))
        c = 0.5 * np.exp(logc)
        p1 = c * np.sqrt(alpha) * hyp1f1(w / 2, 0.5, z)
        p2 = c * beta * ratio * hyp1f1((w + 1) / 2, 1.5, z)
        term = p1 - p2
        total += term
        biggest = max(biggest, abs(p1), abs(p2))
        if abs(term) <= rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                return complex(total), biggest
        else:
            quiet = 0
    raise SpecfunError(f"upsilon series did not converge in {n_max} terms")


def _upsilon_best(alpha, beta, gamma, lam, s, max_condition: float = 1e9) -> complex:
    """Better-conditioned of the two series; raises when both lose too many digits."""
    best = None
    for fn in (upsilon_lemma, upsilon_beta_series):
        try:
            val, cond = fn(alpha, beta, gamma, lam, s, with_condition=True)
        except SpecfunError:
            continue
        if best is None or cond < best[1]:
            best = (val, cond)
    if best is None or best[1] > max_condition:
        raise SpecfunError("both series for the Gaussian-Bessel integral are ill-conditioned here")
    return best[0]


def _beta_terms(alpha, beta, gamma, lam, s, n_max, rel_tol):
    # expand exp(-beta y) and integrate each power against exp(-alpha y^2) I_lam(gamma y)
    z = gamma**2 / (4 * alpha)
    lpre = lam * np.log(gamma) - (lam + 1) * math.log(2) - sp.loggamma(lam + 1)
    total = 0j
    biggest = 0.0
    quiet = 0
    for k in range(n_max):
        mu = (s + k + lam) / 2
        logt = lpre + sp.loggamma(mu) - mu * np.log(alpha) - sp.gammaln(k + 1)
        term = (-beta) ** k * np.exp(logt) * hyp1f1(mu, lam + 1, z) if beta != 0 or k == 0 else 0j
        total += term
        biggest = max(biggest, abs(term))
        if abs(term) <= rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                return complex(total), biggest
        else:
            quiet = 0
    raise SpecfunError(f"power series in beta did not converge in {n_max} terms")


def upsilon_lemma(alpha, beta, gamma, lam, s, n_max: int = 400, rel_tol: float = 1e-15,
                  with_condition: bool = False):
    """``int_0^inf exp(-alpha y^2 - beta y) I_lam(gamma y) y^(s-1) dy`` as a residue series.

    ``sum_n (gamma/2)^(2n+lam) / (n! Gamma(n+lam+1)) F(s+2n+lam)`` where ``F(w)`` is
    the Mellin transform of ``exp(-alpha y^2 - beta y)`` (see :func:`gauss_moment`).
    ``Re alpha = 0`` is allowed when ``Re beta > 0``.  With ``with_condition``
    the ratio of the largest term to the sum is returned as well; digits lost to
    cancellation are about ``log10`` of it.
    """
    total, big = _upsilon_terms(complex(alpha), complex(beta), complex(gamma), lam, s, n_max, rel_tol)
    if with_condition:
        return total, big / max(abs(total), 1e-300)
    return total


def upsilon_beta_series(alpha, beta, gamma, lam, s, n_max: int = 400, rel_tol: float = 1e-15,
                        with_condition: bool = False):
    """Same integral as :func:`upsilon_lemma`, summed as a power series in ``beta``.

    Each term is a Gaussian-Bessel moment in closed form; this ordering avoids
    the cancellation of the residue series when ``|gamma|`` is large.
    """
    total, big = _beta_terms(complex(alpha), complex(beta), complex(gamma), lam, s, n_max, rel_tol)
    if with_condition:
        return total, big / max(abs(total), 1e-300)
    return total


def upsilon_quadrature(alpha, beta, gamma, lam, s) -> complex:
    """Direct quadrature of the defining integral (oracle for :func:`upsilon_lemma`)."""
    def f(y):
        with np.errstate(all="ignore"):
            v = np.exp(-alpha * y**2 - beta * y) * complex(bessel_i(lam, gamma * y)) * y ** (s - 1)
        if not np.isfinite(v):
            v = 0j
        return np.array([v.real, v.imag])

    res, _ = integrate.quad_vec(f, 0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=2000)
    return complex(res[0] + 1j * res[1])


# eigen-expansions ------------------------------------------------------------

EIGEN_KINDS = {
    "halflinear": ("k",),
    "infinitewell": ("a",),
    "poschlteller": ("alpha", "beta"),
    "coulomb": ("e1e2",),
}


@dataclass(frozen=True)
class EigenSystem:
    """Stationary states of a potential with discrete (and for Coulomb, continuous) spectrum.

    Level numbering starts at 1 for ``halflinear`` and ``infinitewell`` and at 0
    for ``poschlteller`` and ``coulomb``.  The Coulomb continuum uses
    energy-normalized regular solutions on ``k in (0, k_max]`` integrated by the
    trapezoid rule over ``k_nodes`` points.
    """

    kind: str
    params: dict = field(default_factory=dict)
    hbar: float = 1.0
    m: float = 1.0
    k_max: float = 5.0
    k_nodes: int = 101
    x_max: float = 150.0
    h: float = 0.005

    def __post_init__(self):
        if self.kind not in EIGEN_KINDS:
            raise ValueError(f"unknown eigen system {self.kind!r}")
        missing = [p for p in EIGEN_KINDS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind} needs {missing}")
        object.__setattr__(self, "_cache", {})

    @classmethod
    def from_potential(cls, spec: PotentialSpec, **kw) -> "EigenSystem":
        return cls(spec.kind, {k: v for k, v in spec.params.items()}, spec.hbar, spec.m, **kw)

    @property
    def first(self) -> int:
        return 1 if self.kind in ("halflinear", "infinitewell") else 0

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind == "infinitewell":
            return (0.0, self.params["a"])
        if self.kind == "poschlteller":
            return (0.0, math.pi / 2)
        return (0.0, math.inf)

    @property
    def bohr(self) -> float:
        return self.hbar**2 / (self.m * self.params["e1e2"])

    def energy(self, n: int) -> float:
        hb, m, p = self.hbar, self.m, self.params
        if self.kind == "halflinear":
            return -airy_zeros(n)[n - 1] * (hb**2 * p["k"] ** 2 / (2 * m)) ** (1 / 3)
        if self.kind == "infinitewell":
            return n**2 * math.pi**2 * hb**2 / (2 * m * p["a"] ** 2)
        if self.kind == "poschlteller":
            return hb**2 / (2 * m) * (p["alpha"] + p["beta"] + 2 * n + 1) ** 2
        return -m * p["e1e2"] ** 2 / (2 * hb**2 * (n + 1) ** 2)

    def eigenfunction(self, n: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        hb, m, p = self.hbar, self.m, self.params
        lo, hi = self.domain
        inside = (x > lo) & (x < hi)
        if self.kind == "halflinear":
            al = (2 * m * p["k"] / hb**2) ** (1 / 3)
            an = airy_zeros(n)[n - 1]
            v = math.sqrt(al) * airy_ai(al * np.where(inside, x, 0) + an) / abs(airy_ai_prime(an))
        elif self.kind == "infinitewell":
            a = p["a"]
            v = math.sqrt(2 / a) * np.sin(n * math.pi * x / a)
        elif self.kind == "poschlteller":
            al, be = p["alpha"], p["beta"]
            lognorm = (math.log(2 * (al + be + 2 * n + 1)) + sp.gammaln(n + 1) + sp.gammaln(al + be + n + 1)
                       - sp.gammaln(al + n + 1) - sp.gammaln(be + n + 1))
            xs = np.where(inside, x, math.pi / 4)
            v = (math.exp(0.5 * lognorm) * np.sin(xs) ** (al + 0.5) * np.cos(xs) ** (be + 0.5)
                 * jacobi(n, al, be, np.cos(2 * xs)))
        else:
            a = self.bohr
            r = 2 * np.where(inside, x, 0) / (a * (n + 1))
            norm = math.sqrt(math.factorial(n) / (a * math.factorial(n + 1)))
            v = norm * r / (n + 1) * np.exp(-r / 2) * laguerre(n, 1.0, r)
        return np.where(inside, v, 0.0)

    def _quad_range(self, psi0: InitialState) -> tuple[float, float]:
        lo, hi = psi0.effective_support()
        dlo, dhi = self.domain
        return max(lo, dlo), min(hi, dhi)

    def coefficients(self, psi0: InitialState, M: int) -> np.ndarray:
        """``c_n = int psi_n(x) Psi(x, 0) dx`` for the first ``M`` levels (adaptive quadrature)."""
        if M < 1:
            raise ValueError("need M >= 1")
        lo, hi = self._quad_range(psi0)
        pts = [b for b in psi0.breaks if lo < b < hi]
        levels = range(self.first, self.first + M)

        def f(y):
            v = psi0(y)
            return np.array([float(self.eigenfunction(n, y) * v) for n in levels])

        res, err = integrate.quad_vec(f, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=4000, points=pts or None)
        if err > 1e-7:
            raise QuadratureError(f"coefficient quadrature error {err:.3g}", err)
        return res

    # Coulomb continuum
    def _continuum(self):
        if "cont" in self._cache:
            return self._cache["cont"]
        a = self.bohr
        ks = np.linspace(0.0, self.k_max, self.k_nodes)[1:]
        h = self.h
        xs = np.arange(0, self.x_max + h / 2, h)
        # regular solution near 0 from its power series: u'' = (-2/(a x) - k^2) u, u ~ x
        def series(xv):
            c = [np.zeros_like(ks), np.ones_like(ks)]
            val = c[1] * xv
            for j in range(2, 40):
                cj = (-(2 / a) * c[j - 1] - ks**2 * (c[j - 2] if j >= 2 else 0)) / (j * (j - 1))
                c.append(cj)
                val = val + cj * xv**j
            return val

        u = np.empty((xs.size, ks.size))
        u[0] = 0.0
        u[1] = series(xs[1])
        u[2] = series(xs[2])
        # Numerov form u'' + q u = 0 with q = 2m(E - V)/hbar^2 = 2/(a x) + k^2
        with np.errstate(divide="ignore"):
            q = (2 / (a * xs))[:, None] + (ks**2)[None, :]
        f = 1 + h * h * q / 12
        for i in range(2, xs.size - 1):
            u[i + 1] = ((12 - 10 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
        # amplitude from the WKB invariant at the far end
        i1 = xs.size - 2
        du = (u[i1 + 1] - u[i1 - 1]) / (2 * h)
        kl = np.sqrt(ks**2 + 2 / (a * xs[i1]))
        amp = np.sqrt((u[i1] ** 2 + (du / kl) ** 2) * kl / ks)
        u = u * (math.sqrt(2 / math.pi) / amp)[None, :]
        # energy normalization in k with E = hbar^2 k^2 / 2m
        self._cache["cont"] = (ks, xs, u)
        return self._cache["cont"]

    def continuum_coefficients(self, psi0: InitialState):
        ks, xs, u = self._continuum()
        lo, hi = self._quad_range(psi0)
        sel = (xs >= lo) & (xs <= hi)
        w = psi0(xs[sel])
        ck = integrate.simpson(u[sel] * w[:, None], x=xs[sel], axis=0)
        return ks, ck

    def continuum_weight(self) -> np.ndarray:
        ks = np.linspace(0.0, self.k_max, self.k_nodes)
        w = np.full(ks.size, ks[1] - ks[0])
        w[0] = w[-1] = w[0] / 2
        return w[1:]

    def continuum_states(self, x) -> np.ndarray:
        ks, xs, u = self._continuum()
        spline = CubicSpline(xs, u, axis=0)
        xv = np.asarray(x, dtype=float)
        return np.where((xv > 0)[:, None], spline(np.clip(xv, 0, xs[-1])), 0.0)


def evolve_eigenbasis(system: EigenSystem, psi0: InitialState, t: float, x, M: int,
                      continuum: bool = True) -> np.ndarray:
    """``sum_n c_n psi_n(x) exp(-i E_n t / hbar)`` over ``M`` levels, plus the Coulomb continuum."""
    xs = _points(x)
    c = system.coefficients(psi0, M)
    out = np.zeros(xs.shape, dtype=complex)
    for j, n in enumerate(range(system.first, system.first + M)):
        out += c[j] * system.eigenfunction(n, xs) * np.exp(-1j * system.energy(n) * t / system.hbar)
    if system.kind == "coulomb" and continuum:
        ks, ck = system.continuum_coefficients(psi0)
        Ek = system.hbar**2 * ks**2 / (2 * system.m)
        phase = np.exp(-1j * Ek * t / system.hbar)
        out += system.continuum_states(xs) @ (system.continuum_weight() * ck * phase)
    return out


def probability_mass(psi, x) -> float:
    """``delta * sum |psi|^2`` on a uniform set of points."""
    xs = _points(x)
    d = xs[1] - xs[0] if xs.size > 1 else 1.0
    return float(np.sum(np.abs(psi) ** 2) * d)
