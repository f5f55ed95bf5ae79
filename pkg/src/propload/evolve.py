"""Time evolution on a discretized Hamiltonian.

Engines: split-operator Trotter steps, a fast-forward harmonic oscillator
built from the disentangling identity, a dense reference propagator, and
phase-estimation projection onto the ground state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh

from .gridpdf import Grid
from .hamiltonian import DiscreteHamiltonian
from .state import Circuit, Gate, QState

__all__ = [
    "TrotterPlan",
    "PhaseEstimate",
    "trotter_step",
    "trotter_circuit",
    "evolve_trotter",
    "fastforward_qho",
    "evolve_dense",
    "dense_propagator",
    "project_ground",
    "qpe_distribution",
]

FF_CHUNK = math.pi / 4


def _vec(state) -> np.ndarray:
    return state.amps if isinstance(state, QState) else np.asarray(state, dtype=complex)


def _like(state, amps):
    if isinstance(state, QState):
        return QState(state.n_qubits, amps)
    return amps


@dataclass(frozen=True)
class TrotterPlan:
    """Step rule ``dt = sqrt(eps / t)``, ``n_steps = ceil(t / dt)``.

    The steps actually taken have length ``t / n_steps <= dt``.
    """

    t: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.t < 0:
            raise ValueError("t must be non-negative")

    @property
    def dt(self) -> float:
        return math.sqrt(self.eps / self.t) if self.t > 0 else 0.0

    @property
    def n_steps(self) -> int:
        if self.t == 0:
            return 0
        return max(1, math.ceil(self.t / self.dt - 1e-12))

    @property
    def step(self) -> float:
        return self.t / self.n_steps if self.n_steps else 0.0


def _check(state, H: DiscreteHamiltonian) -> np.ndarray:
    v = _vec(state)
    if v.shape != (H.grid.size,):
        raise ValueError(f"state of length {v.size} does not match a grid of {H.grid.size} points")
    return v


def _split_step(v: np.ndarray, H: DiscreteHamiltonian, dt: float, n: int = 1) -> np.ndarray:
    half = np.exp(-0.5j * dt * H.v_diag)
    full = np.exp(-1j * dt * H.v_diag)
    kin = np.exp(-1j * dt * H.kinetic_spectrum())
    # neighbouring half steps of V merge into one full step
    v = half * v
    for i in range(n):
        v = np.fft.ifft(kin * np.fft.fft(v))
        v = (full if i < n - 1 else half) * v
    return v


def trotter_step(state, H: DiscreteHamiltonian, dt: float):
    """One symmetric step ``e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}``."""
    return _like(state, _split_step(_check(state, H), H, dt))


def trotter_circuit(H: DiscreteHamiltonian, dt: float) -> Circuit:
    """The step as phase, Fourier and phase gates.

    The kinetic spectrum is even in the Fourier index, so either transform
    direction diagonalizes it.
    """
    n = H.grid.N
    half = -0.5 * dt * H.v_diag
    return Circuit(n, [
        Gate.diag(half),
        Gate("QFT"),
        Gate.diag(-dt * H.kinetic_spectrum()),
        Gate("IQFT"),
        Gate.diag(half),
    ])


def evolve_trotter(state, H: DiscreteHamiltonian, t: float, eps: float):
    """Evolve to time ``t`` with the step rule of :class:`TrotterPlan`."""
    plan = TrotterPlan(t, eps)
    v = _check(state, H)
    if plan.n_steps == 0:
        return _like(state, v.copy())
    return _like(state, _split_step(v, H, plan.step, plan.n_steps))


def fastforward_qho(state, t: float, grid: Grid, m: float = 0.5, omega: float = 2.0,
                    hbar: float = 1.0, chunk: float = FF_CHUNK):
    """``exp(-i t H)`` for ``H = p^2/2m + m omega^2 x^2 / 2`` with three diagonal phases.

    With ``tau = omega t / 2`` the propagator factors as
    ``exp(-i a x^2) exp(-i b p^2) exp(-i a x^2)`` where ``a = m omega tan(tau) / 2hbar``
    and ``b = hbar sin(2 tau) / (2 m omega)``.  The defaults give ``H = p^2 + x^2``.
    Times with ``|tau| >= chunk`` are split into equal pieces below ``chunk``.
    """
    v = _vec(state)
    if v.shape != (grid.size,):
        raise ValueError("state does not match the grid")
    if grid.support != "symmetric":
        raise ValueError("fast-forward needs a symmetric grid")
    tau = omega * t / 2
    pieces = max(1, math.ceil(abs(tau) / chunk + 1e-12)) if tau else 0
    if pieces == 0:
        return _like(state, v.copy())
    sub = tau / pieces
    x2 = grid.x**2
    p2 = grid.momenta**2
    pos = np.exp(-0.5j * m * omega * math.tan(sub) * x2 / hbar)
    mom = np.exp(-1j * hbar * math.sin(2 * sub) * p2 / (2 * m * omega))
    for _ in range(pieces):
        v = pos * v
        v = np.fft.ifft(mom * np.fft.fft(v))
        v = pos * v
    return _like(state, v)


def dense_propagator(H: DiscreteHamiltonian, t: float) -> np.ndarray:
    """``exp(-i H t)`` from a dense eigendecomposition."""
    w, U = eigh(H.dense())
    return (U * np.exp(-1j * w * t)) @ U.conj().T


def evolve_dense(state, H: DiscreteHamiltonian, t: float):
    """Reference evolution by exact diagonalization (small grids)."""
    v = _check(state, H)
    w, U = eigh(H.dense())
    return _like(state, U @ (np.exp(-1j * w * t) * (U.conj().T @ v)))


@dataclass(frozen=True)
class PhaseEstimate:
    """Outcome of ground-state projection.

    ``phase`` is the ground bin divided by ``2**m``; ``state`` the normalized
    system state conditioned on that bin; ``p_ground`` its exact probability;
    ``success_rate`` the observed frequency over ``shots``.
    """

    m_ancilla: int
    phase: float
    ground_bin: int
    state: QState
    p_ground: float
    success: bool
    success_rate: float
    shots: int
    counts: np.ndarray
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "m_ancilla": self.m_ancilla,
            "phase": self.phase,
            "ground_bin": self.ground_bin,
            "p_ground": self.p_ground,
            "success": self.success,
            "success_rate": self.success_rate,
            "shots": self.shots,
            "status": self.status,
        }


def qpe_distribution(state, propagate: Callable[[np.ndarray, float], np.ndarray], t0: float, m: int) -> np.ndarray:
    """Joint ``(2**m, dim)`` amplitudes after phase estimation, before measurement.

    Ancilla ``j`` controls ``U(2**j t0)``; the ancilla register is then Fourier
    transformed so an eigenvalue ``E`` concentrates on bin ``E t0 2**m / (2 pi)``.
    """
    v = _vec(state)
    K = 2**m
    rows = np.tile(v / math.sqrt(K), (K, 1)).astype(complex)
    a = np.arange(K)
    for j in range(m):
        sel = np.nonzero((a >> j) & 1)[0]
        tj = (2**j) * t0
        for r in sel:
            rows[r] = propagate(rows[r], tj)
    # U = exp(-iEt), so outcome y collects sum_a exp(+2 pi i a y / K)
    return np.fft.ifft(rows, axis=0, norm="ortho")


def project_ground(state, propagate: Callable[[np.ndarray, float], np.ndarray], t0: float, m_ancilla: int,
                   shots: int = 1000, seed: int = 0, ground_energy: float | None = None,
                   gap: float | None = None) -> PhaseEstimate:
    """Phase-estimation projection with post-selection on the ground bin.

    ``propagate(v, t)`` must return ``exp(-iHt) v``.  The ground bin comes
    from ``ground_energy`` when given, else it is the modal outcome.  A gap
    smaller than one bin sets ``status`` to ``"warning"``.
    """
    if m_ancilla < 1:
        raise ValueError("need at least one ancilla")
    v = _vec(state)
    joint = qpe_distribution(v, propagate, t0, m_ancilla)
    K = 2**m_ancilla
    probs = np.sum(np.abs(joint) ** 2, axis=1)
    probs = probs / probs.sum()
    if ground_energy is not None:
        ground = int(round(ground_energy * t0 * K / (2 * math.pi))) % K
    else:
        ground = int(np.argmax(probs))
    status = "ok"
    if gap is not None and gap * t0 * K / (2 * math.pi) < 1:
        status = "warning"
        warnings.warn("spectral gap below phase resolution", RuntimeWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(K, size=shots, p=probs) if shots else np.array([], dtype=int)
    counts = np.bincount(outcomes, minlength=K)
    post = joint[ground]
    nrm = np.linalg.norm(post)
    if nrm == 0:
        raise ValueError("ground bin has zero probability")
    n = int(round(math.log2(v.size)))
    rate = float(counts[ground] / shots) if shots else float("nan")
    return PhaseEstimate(
        m_ancilla=m_ancilla,
        phase=ground / K,
        ground_bin=ground,
        state=QState(n, post / nrm),
        p_ground=float(probs[ground]),
        success=bool(shots and outcomes[-1] == ground),
        success_rate=rate,
        shots=shots,
        counts=counts,
        status=status,
    )
