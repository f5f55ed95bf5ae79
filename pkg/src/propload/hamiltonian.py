"""Potentials, discretized Hamiltonians and the inverse ground-state map.

The kinetic term is ``-(hbar^2 / 2m) d^2/dx^2``.  On the grid it is either the
periodic three-point stencil (spectrum ``2(1 - cos(2 pi j / 2^N)) / delta^2``,
exactly diagonalized by the Fourier transform) or the spectral ``p^2``
operator.  With ``m = 1/2`` and ``hbar = 1`` the Hamiltonian is the bare
``Delta + V`` form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gridpdf import Grid

__all__ = [
    "PotentialSpec",
    "DiscreteHamiltonian",
    "V_WALL",
    "POTENTIAL_KINDS",
    "potential_values",
    "build_potential",
    "build_hamiltonian",
    "laplacian_spectrum",
    "potential_from_ground_state",
]

V_WALL = 1e6
PSI_FLOOR = 1e-10

POTENTIAL_KINDS = {
    "zero": (),
    "harmonic": ("omega",),
    "radial": ("omega", "lam"),
    "halflinear": ("k",),
    "linear": ("k",),
    "infinitewell": ("a",),
    "poschlteller": ("alpha", "beta"),
    "coulomb": ("e1e2",),
    "delta": ("a",),
    "fromgroundstate": ("psi",),
}
POSITIVE_ONLY = {"radial", "coulomb"}


@dataclass(frozen=True)
class PotentialSpec:
    """Tagged potential.  ``params`` holds the kind's named parameters."""

    kind: str
    params: dict = field(default_factory=dict)
    hbar: float = 1.0
    m: float = 1.0
    wall: float = V_WALL

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        missing = [p for p in POTENTIAL_KINDS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind} potential needs {missing}")
        p = self.params
        if self.kind in ("harmonic", "radial") and not p["omega"] > 0:
            raise ValueError("omega must be positive")
        if self.kind == "radial" and not np.real(p["lam"]) > -1:
            raise ValueError("radial potential needs Re(lambda) > -1")
        if self.kind in ("delta", "infinitewell") and not p["a"] > 0:
            raise ValueError("a must be positive")
        if not (self.hbar > 0 and self.m > 0):
            raise ValueError("hbar and m must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        d = dict(d)
        kind = d.pop("kind").lower()
        hbar = d.pop("hbar", 1.0)
        m = d.pop("m", 1.0)
        wall = d.pop("wall", V_WALL)
        if kind == "radial" and "lambda" in d:
            d["lam"] = d.pop("lambda")
        return cls(kind, d, hbar, m, wall)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **{k: v for k, v in self.params.items() if k != "psi"}}
        d.update(hbar=self.hbar, m=self.m)
        return d


def potential_values(spec: PotentialSpec, x) -> np.ndarray:
    """Continuum ``V(x)`` (hard walls replaced by ``spec.wall``)."""
    x = np.asarray(x, dtype=float)
    p, hb, m, W = spec.params, spec.hbar, spec.m, spec.wall
    k = spec.kind
    if k == "zero":
        return np.zeros_like(x)
    if k == "harmonic":
        return 0.5 * m * p["omega"] ** 2 * x**2
    if k == "radial":
        lam = p["lam"]
        return 0.5 * m * p["omega"] ** 2 * x**2 + hb**2 * (lam**2 - 0.25) / (2 * m * x**2)
    if k == "halflinear":
        return np.where(x > 0, p["k"] * x, W)
    if k == "linear":
        return p["k"] * x
    if k == "infinitewell":
        return np.where((x > 0) & (x < p["a"]), 0.0, W)
    if k == "poschlteller":
        inside = (x > 0) & (x < np.pi / 2)
        xs = np.where(inside, x, np.pi / 4)
        v = hb**2 / (2 * m) * ((p["alpha"] ** 2 - 0.25) / np.sin(xs) ** 2 + (p["beta"] ** 2 - 0.25) / np.cos(xs) ** 2)
        return np.where(inside, v, W)
    if k == "coulomb":
        return -p["e1e2"] / np.abs(x)
    raise ValueError(f"{k} has no pointwise continuum form")


@dataclass(frozen=True)
class DiscreteHamiltonian:
    """``H = -(hbar^2/2m) D2 + diag(v)`` on a grid."""

    grid: Grid
    v_diag: np.ndarray
    hbar: float = 1.0
    m: float = 1.0
    kinetic: str = "stencil"

    def __post_init__(self):
        v = np.asarray(self.v_diag, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError("potential vector length must match the grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential must be finite on every grid point")
        if self.kinetic not in ("stencil", "spectral"):
            raise ValueError("kinetic must be 'stencil' or 'spectral'")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "v_diag", v)

    @property
    def kinetic_coeff(self) -> float:
        return self.hbar**2 / (2 * self.m)

    @property
    def laplacian_coeff(self) -> float:
        return 1.0 / self.grid.delta**2

    def kinetic_spectrum(self) -> np.ndarray:
        """Kinetic eigenvalues in numpy FFT ordering."""
        if self.kinetic == "stencil":
            return self.kinetic_coeff * laplacian_spectrum(self.grid)
        return self.kinetic_coeff * self.grid.momenta**2

    def apply(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        kin = np.fft.ifft(self.kinetic_spectrum() * np.fft.fft(psi))
        return kin + self.v_diag * psi

    def dense(self) -> np.ndarray:
        n = self.grid.size
        F = np.fft.fft(np.eye(n), axis=0)
        K = np.fft.ifft(self.kinetic_spectrum()[:, None] * F, axis=0)
        if self.kinetic == "stencil":
            K = K.real
        H = K + np.diag(self.v_diag)
        return 0.5 * (H + H.conj().T)

    def with_kinetic(self, kinetic: str) -> "DiscreteHamiltonian":
        return DiscreteHamiltonian(self.grid, self.v_diag, self.hbar, self.m, kinetic)


def laplacian_spectrum(grid: Grid) -> np.ndarray:
    """Eigenvalues ``2(1 - cos(2 pi j / 2^N)) / delta^2``, ``j = 0..2^N - 1``."""
    j = np.arange(grid.size)
    return 2.0 * (1.0 - np.cos(2 * np.pi * j / grid.size)) / grid.delta**2


def build_potential(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    """Potential sampled on the grid midpoints."""
    if spec.kind in POSITIVE_ONLY and grid.support != "positive":
        raise ValueError(f"{spec.kind} potential needs a positive grid")
    x = grid.x
    if spec.kind == "delta":
        v = np.zeros(grid.size)
        v[int(np.argmin(np.abs(x)))] = -spec.params["a"] / grid.delta
        return v
    if spec.kind == "fromgroundstate":
        psi = np.asarray(spec.params["psi"], dtype=float)
        v, ok = potential_from_ground_state(psi, grid, spec.hbar, spec.m)
        return np.where(ok, v, spec.wall)
    return potential_values(spec, x)


def build_hamiltonian(spec: PotentialSpec, grid: Grid, kinetic: str = "stencil") -> DiscreteHamiltonian:
    return DiscreteHamiltonian(grid, build_potential(spec, grid), spec.hbar, spec.m, kinetic)


def potential_from_ground_state(psi0, grid: Grid, hbar: float = 1.0, m: float = 1.0):
    """Potential with ground state ``psi0`` at zero energy.

    ``V_i = (hbar^2/2m) (psi_{i+1} - 2 psi_i + psi_{i-1}) / (delta^2 psi_i)`` at
    interior points.  Returns ``(V, valid)``; end points and points with
    ``|psi_i| < 1e-10`` are invalid and hold NaN.
    """
    psi = np.asarray(psi0, dtype=float)
    if psi.shape != (grid.size,):
        raise ValueError("ground state samples must match the grid")
    v = np.full(grid.size, np.nan)
    valid = np.zeros(grid.size, dtype=bool)
    centre = psi[1:-1]
    good = np.abs(centre) >= PSI_FLOOR
    d2 = psi[2:] - 2 * centre + psi[:-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        vi = hbar**2 / (2 * m) * d2 / (grid.delta**2 * centre)
    v[1:-1] = np.where(good, vi, np.nan)
    valid[1:-1] = good
    return v, valid
