"""Spatial grids, target densities, amplitude encodings and distribution distances."""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, sqrt, pi

import numpy as np

from .state import QState

__all__ = [
    "Grid",
    "TargetPdf",
    "EncodedState",
    "parse_pdf",
    "pdf_eval",
    "amplitude_encode",
    "distance",
    "Distance",
]


@dataclass(frozen=True)
class Grid:
    """``2**N`` midpoints on ``[-L, L]`` (symmetric) or ``[0, 2L]`` (positive)."""

    N: int
    L: float
    support: str = "symmetric"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.support not in ("symmetric", "positive"):
            raise ValueError("support must be 'symmetric' or 'positive'")

    @property
    def size(self) -> int:
        return 2**self.N

    @property
    def delta(self) -> float:
        return 2.0 * self.L / self.size

    @property
    def left(self) -> float:
        return -self.L if self.support == "symmetric" else 0.0

    @property
    def right(self) -> float:
        return self.left + 2.0 * self.L

    @property
    def x(self) -> np.ndarray:
        i = np.arange(self.size)
        return self.left + (1 + 2 * i) * self.L / self.size

    @property
    def momenta(self) -> np.ndarray:
        """Fourier-dual momenta ``2 pi j~ / (2L)`` with signed index ``j~``."""
        return 2 * np.pi * np.fft.fftfreq(self.size, d=1.0 / self.size) / (2.0 * self.L)

    def to_dict(self) -> dict:
        return {"N": self.N, "L": self.L, "support": self.support}


@dataclass(frozen=True)
class TargetPdf:
    """A named univariate density.

    ``kind`` is one of normal, lognormal, chi, maxwell, laplace, uniform.
    ``params`` are (mu, sigma), (mu, sigma), (k,), (), (mu, b) and (a, b).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        k, p = self.kind, self.params
        if k in ("normal", "lognormal"):
            p = p or (0.0, 1.0)
            if len(p) != 2 or not p[1] > 0:
                raise ValueError(f"{k} needs (mu, sigma) with sigma > 0")
        elif k == "chi":
            if len(p) != 1 or p[0] < 1 or p[0] != int(p[0]):
                raise ValueError("chi needs an integer k >= 1")
        elif k == "maxwell":
            p = ()
        elif k == "laplace":
            p = p or (0.0, 1.0)
            if len(p) != 2 or not p[1] > 0:
                raise ValueError("laplace needs (mu, b) with b > 0")
        elif k == "uniform":
            if len(p) != 2 or not p[1] > p[0]:
                raise ValueError("uniform needs (a, b) with b > a")
        else:
            raise ValueError(f"unknown pdf kind {k!r}")
        object.__setattr__(self, "params", p)

    def __call__(self, x):
        return pdf_eval(self, x)

    @property
    def is_symmetric(self) -> bool:
        if self.kind in ("normal", "laplace"):
            return self.params[0] == 0.0
        if self.kind == "uniform":
            return self.params[0] == -self.params[1]
        return False


def parse_pdf(tag: str, **params) -> TargetPdf:
    """Build a :class:`TargetPdf` from a string tag such as ``"chi:3"`` or ``"normal"``."""
    tag = tag.strip().lower()
    if tag.startswith("chi:"):
        return TargetPdf("chi", (int(tag.split(":", 1)[1]),))
    defaults = {
        "normal": ("mu", "sigma", 0.0, 1.0),
        "lognormal": ("mu", "sigma", 0.0, 1.0),
        "laplace": ("mu", "b", 0.0, 1.0),
        "uniform": ("a", "b", -1.0, 1.0),
    }
    if tag == "maxwell":
        return TargetPdf("maxwell")
    if tag in defaults:
        n1, n2, d1, d2 = defaults[tag]
        return TargetPdf(tag, (params.get(n1, d1), params.get(n2, d2)))
    raise ValueError(f"unknown pdf tag {tag!r}")


def _chi(x, k):
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    logc = (1 - k / 2) * log(2) - lgamma(k / 2)
    out[pos] = np.exp(logc - xp**2 / 2 + (k - 1) * np.log(xp))
    return out


def pdf_eval(target: TargetPdf, x):
    """Density of ``target`` at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    k, p = target.kind, target.params
    if k == "normal":
        mu, s = p
        y = np.exp(-0.5 * ((xa - mu) / s) ** 2) / (s * sqrt(2 * pi))
    elif k == "lognormal":
        mu, s = p
        y = np.zeros_like(xa)
        pos = xa > 0
        xp = xa[pos]
        y[pos] = np.exp(-((np.log(xp) - mu) ** 2) / (2 * s * s)) / (xp * s * sqrt(2 * pi))
    elif k == "chi":
        y = _chi(xa, int(p[0]))
    elif k == "maxwell":
        y = _chi(xa, 3)
    elif k == "laplace":
        mu, b = p
        y = np.exp(-np.abs(xa - mu) / b) / (2 * b)
    elif k == "uniform":
        a, b = p
        y = np.where((xa >= a) & (xa <= b), 1.0 / (b - a), 0.0)
    else:  # pragma: no cover - guarded in TargetPdf
        raise ValueError(k)
    return float(y[0]) if scalar else y


@dataclass(frozen=True)
class EncodedState:
    state: QState
    grid: Grid
    mode: str
    Z: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.state.amps) ** 2


def amplitude_encode(target, grid: Grid, mode: str = "sampler") -> EncodedState:
    """Encode a density on the grid midpoints.

    ``mode="density"`` gives amplitudes proportional to ``p(x_i)``;
    ``mode="sampler"`` gives amplitudes proportional to ``sqrt(p(x_i))``.
    ``target`` may be a :class:`TargetPdf` or any callable.
    """
    if mode not in ("density", "sampler"):
        raise ValueError("mode must be 'density' or 'sampler'")
    p = np.asarray(target(grid.x), dtype=float)
    if np.any(p < 0):
        raise ValueError("density must be non-negative")
    v = p if mode == "density" else np.sqrt(p)
    Z = float(np.linalg.norm(v))
    if Z == 0:
        raise ValueError("density vanishes on every grid point")
    return EncodedState(QState(grid.N, v / Z), grid, mode, Z)


@dataclass(frozen=True)
class Distance:
    l2: float
    sup: float
    tv: float

    def as_dict(self) -> dict:
        return {"l2": self.l2, "sup": self.sup, "tv": self.tv}


def _probs(obj) -> np.ndarray:
    if isinstance(obj, QState):
        return np.abs(obj.amps) ** 2
    if isinstance(obj, EncodedState):
        return obj.probabilities
    return np.asarray(obj, dtype=float)


def distance(a, reference, delta: float | None = None) -> Distance:
    """Distances between two probability vectors.

    Arguments may be states (probabilities ``|amp|^2``), encoded states or raw
    probability vectors.  ``sup`` compares densities, i.e. probabilities divided
    by the grid spacing ``delta`` (taken from an encoded reference when omitted,
    else 1).
    """
    p, q = _probs(a), _probs(reference)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch {p.shape} vs {q.shape}")
    if delta is None:
        delta = reference.grid.delta if isinstance(reference, EncodedState) else 1.0
    d = p - q
    return Distance(float(np.linalg.norm(d)), float(np.max(np.abs(d)) / delta), float(0.5 * np.sum(np.abs(d))))
