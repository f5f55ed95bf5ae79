"""Variational real-time evolution of a hardware-efficient ansatz.

The ansatz is a Hadamard column, a rotation column, then ``layers`` blocks of
(circular CNOT chain, rotation column).  Rotations are ``R_s(t) = exp(-i t s/2)``
so the derivative with respect to a rotation angle inserts ``-i s / 2`` at that
gate.  Parameters follow the McLachlan equations
``sum_j Re<d_k phi|d_j phi> dtheta_j/dtau = Im<d_k phi|H|phi>``
integrated by forward Euler.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np
from scipy import linalg, optimize
from scipy.integrate import solve_ivp

from .hamiltonian import DiscreteHamiltonian
from .state import Circuit, Gate, QState

__all__ = [
    "Ansatz",
    "McLachlanSystem",
    "Trajectory",
    "ansatz_state",
    "ansatz_deriv",
    "ansatz_jacobian",
    "mclachlan_system",
    "theta_dot",
    "run_varqrte",
    "reference_theta",
    "fit_ansatz",
    "exact_evolution",
    "pilot_threshold",
    "LAMBDA_REG",
    "PILOT_CONFIG",
    "pilot_problem",
    "pilot_run",
]

LAMBDA_REG = 1e-8
PINV_CUTOFF = 1e-10
PAULI = {
    "Rx": np.array([[0, 1], [1, 0]], dtype=complex),
    "Ry": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Rz": np.array([[1, 0], [0, -1]], dtype=complex),
}
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class Ansatz:
    """Layered rotation ansatz on ``n_qubits``.

    The parameter count is ``len(rotations) * n_qubits * (layers + 1)``, which is
    ``3 n (L + 1)`` for the default ``Rx, Ry, Rz`` columns.
    """

    n_qubits: int
    layers: int
    rotations: tuple = ("Rx", "Ry", "Rz")
    hadamard: bool = True

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 0:
            raise ValueError("need n_qubits >= 1 and layers >= 0")
        bad = [r for r in self.rotations if r not in PAULI]
        if bad or not self.rotations:
            raise ValueError(f"rotations must be drawn from {sorted(PAULI)}")

    @property
    def n_params(self) -> int:
        return len(self.rotations) * self.n_qubits * (self.layers + 1)

    def _column(self, start: int) -> list[tuple]:
        out, k = [], start
        for q in range(self.n_qubits):
            for r in self.rotations:
                out.append(("rot", r, q, k))
                k += 1
        return out

    def structure(self) -> list[tuple]:
        """Gate list: ``("H", q)``, ``("CNOT", c, t)`` or ``("rot", kind, q, k)``."""
        n = self.n_qubits
        ops: list[tuple] = [("H", q) for q in range(n)] if self.hadamard else []
        per = len(self.rotations) * n
        ops += self._column(0)
        for layer in range(self.layers):
            if n > 1:
                ops += [("CNOT", q, (q + 1) % n) for q in range(n)]
            ops += self._column(per * (layer + 1))
        return ops

    def circuit(self, theta) -> Circuit:
        theta = self._check(theta)
        gates = []
        for op in self.structure():
            if op[0] == "H":
                gates.append(Gate.h(op[1]))
            elif op[0] == "CNOT":
                gates.append(Gate.cnot(op[1], op[2]))
            else:
                gates.append(Gate(op[1], (op[2],), float(theta[op[3]])))
        return Circuit(self.n_qubits, gates)

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {theta.shape}")
        return theta


def _apply_1q(A: np.ndarray, U: np.ndarray, q: int, n: int) -> np.ndarray:
    B = A.shape[1]
    t = A.reshape((2,) * n + (B,))
    t = np.moveaxis(np.tensordot(U, t, axes=([1], [q])), 0, q)
    return t.reshape(2**n, B)


def _apply_cnot(A: np.ndarray, c: int, tq: int, n: int) -> np.ndarray:
    B = A.shape[1]
    t = A.reshape((2,) * n + (B,)).copy()
    idx = [slice(None)] * (n + 1)
    idx[c] = 1
    sub = t[tuple(idx)]
    axis = tq if tq < c else tq - 1
    t[tuple(idx)] = np.flip(sub, axis=axis)
    return t.reshape(2**n, B)


def _rotation(kind: str, angle: float) -> np.ndarray:
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * PAULI[kind]


def ansatz_jacobian(ansatz: Ansatz, theta) -> tuple[np.ndarray, np.ndarray]:
    """``(phi, D)`` with ``D[:, k] = d phi / d theta_k``, from one batched forward pass."""
    theta = ansatz._check(theta)
    n, P = ansatz.n_qubits, ansatz.n_params
    A = np.zeros((2**n, P + 1), dtype=complex)
    A[0, 0] = 1.0
    for op in ansatz.structure():
        if op[0] == "H":
            A = _apply_1q(A, _H, op[1], n)
        elif op[0] == "CNOT":
            A = _apply_cnot(A, op[1], op[2], n)
        else:
            _, kind, q, k = op
            A = _apply_1q(A, _rotation(kind, theta[k]), q, n)
            A[:, k + 1] = _apply_1q(A[:, :1], -0.5j * PAULI[kind], q, n)[:, 0]
    return A[:, 0].copy(), A[:, 1:].copy()


def ansatz_state(ansatz: Ansatz, theta) -> QState:
    phi, _ = ansatz_jacobian(ansatz, theta)
    return QState(ansatz.n_qubits, phi)


def ansatz_deriv(ansatz: Ansatz, theta, k: int) -> np.ndarray:
    if not 0 <= k < ansatz.n_params:
        raise IndexError(f"parameter index {k} out of range")
    return ansatz_jacobian(ansatz, theta)[1][:, k]


def _h_apply(H) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(H, DiscreteHamiltonian):
        return H.apply
    if callable(H):
        return H
    Hm = np.asarray(H, dtype=complex)
    return lambda v: Hm @ v


def _h_dense(H, dim: int) -> np.ndarray:
    if isinstance(H, DiscreteHamiltonian):
        return H.dense()
    if callable(H):
        return np.column_stack([H(e) for e in np.eye(dim, dtype=complex)])
    return np.asarray(H, dtype=complex)


@dataclass(frozen=True)
class McLachlanSystem:
    """``M = Re<d_k|d_j>``, ``V = Im<d_k|H|phi>`` and the regularization used to solve it."""

    M: np.ndarray
    V: np.ndarray
    lam: float = LAMBDA_REG

    @property
    def condition(self) -> float:
        w = np.linalg.eigvalsh(self.M)
        top = float(w[-1])
        low = float(w[0])
        return math.inf if low <= 0 else top / low

    @property
    def regularized_condition(self) -> float:
        """Condition number of the solved matrix ``M + lam I``."""
        w = np.linalg.eigvalsh(self.M)
        return float((w[-1] + self.lam) / max(w[0] + self.lam, np.finfo(float).tiny))

    def solve(self) -> tuple[np.ndarray, float, str]:
        """``(theta_dot, residual, status)``.

        Tikhonov-regularized Cholesky solve; if that fails the pseudo-inverse
        with singular values below ``1e-10`` (relative) dropped is used and the
        status becomes ``"pinv"``.
        """
        P = self.M.shape[0]
        A = self.M + self.lam * np.eye(P)
        status = "ok"
        try:
            c = linalg.cho_factor(A)
            x = linalg.cho_solve(c, self.V)
        except linalg.LinAlgError:
            x = np.linalg.pinv(self.M, rcond=PINV_CUTOFF) @ self.V
            status = "pinv"
        res = float(np.linalg.norm(self.M @ x - self.V))
        return x, res, status


def mclachlan_system(ansatz: Ansatz, theta, H, lam: float = LAMBDA_REG,
                     phase_correction: bool = False) -> McLachlanSystem:
    """Assemble ``M`` and ``V`` from exact statevector derivatives.

    With ``phase_correction`` the projections onto ``phi`` are removed from
    both sides, which makes the equations blind to the global phase.
    """
    phi, D = ansatz_jacobian(ansatz, theta)
    Hphi = _h_apply(H)(phi)
    G = D.conj().T @ D
    W = D.conj().T @ Hphi
    if phase_correction:
        o = D.conj().T @ phi
        G = G - np.outer(o, o.conj())
        W = W - o * np.vdot(phi, Hphi)
    M = G.real
    M = 0.5 * (M + M.T)
    return McLachlanSystem(M, W.imag.copy(), lam)


def theta_dot(ansatz: Ansatz, theta, H, lam: float = LAMBDA_REG, phase_correction: bool = False) -> np.ndarray:
    return mclachlan_system(ansatz, theta, H, lam, phase_correction).solve()[0]


def exact_evolution(H, psi0: np.ndarray, times) -> np.ndarray:
    """Rows ``exp(-i H t) psi0`` for each ``t`` by dense diagonalization."""
    psi0 = np.asarray(psi0, dtype=complex)
    w, U = np.linalg.eigh(_h_dense(H, psi0.size))
    c = U.conj().T @ psi0
    times = np.asarray(times, dtype=float)
    return (U @ (np.exp(-1j * np.outer(w, times)) * c[:, None])).T


@dataclass
class Trajectory:
    """Recorded steps; ``cond`` is the condition number of ``M + lam I`` (``M`` itself is often singular)."""

    tau: np.ndarray
    theta: np.ndarray
    fidelity: np.ndarray
    residual: np.ndarray
    cond: np.ndarray
    status: str = "ok"
    notes: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["tau,fidelity,residual,cond"]
        for t, f, r, c in zip(self.tau, self.fidelity, self.residual, self.cond):
            lines.append(f"{t:.10g},{f:.12g},{r:.6e},{c:.6e}")
        return "\n".join(lines) + "\n"


def run_varqrte(ansatz: Ansatz, theta0, H, T: float, dtau: float, lam: float = LAMBDA_REG,
                phase_correction: bool = False, record_every: int = 1) -> Trajectory:
    """Forward-Euler McLachlan trajectory with fidelity against exact evolution of ``phi(theta0)``."""
    if not dtau > 0:
        raise ValueError("dtau must be positive")
    n_steps = max(1, int(round(T / dtau)))
    h = T / n_steps
    theta = ansatz._check(theta0).copy()
    phi0 = ansatz_jacobian(ansatz, theta)[0]
    happly = _h_apply(H)
    w, U = np.linalg.eigh(_h_dense(H, phi0.size))
    c0 = U.conj().T @ phi0
    taus, thetas, fids, ress, conds = [], [], [], [], []
    status = "ok"
    notes = []

    def record(step, th, phi, res, cond):
        t = step * h
        ex = U @ (np.exp(-1j * w * t) * c0)
        taus.append(t)
        thetas.append(th.copy())
        fids.append(abs(np.vdot(ex, phi)) ** 2)
        ress.append(res)
        conds.append(cond)

    for step in range(n_steps + 1):
        phi, D = ansatz_jacobian(ansatz, theta)
        G = D.conj().T @ D
        Wv = D.conj().T @ happly(phi)
        if phase_correction:
            o = D.conj().T @ phi
            G = G - np.outer(o, o.conj())
            Wv = Wv - o * np.vdot(phi, happly(phi))
        sysm = McLachlanSystem(0.5 * (G.real + G.real.T), Wv.imag.copy(), lam)
        dth, res, st = sysm.solve()
        if st != "ok" and status == "ok":
            status = st
            notes.append(f"step {step}: regularized solve failed, used pseudo-inverse (cond {sysm.condition:.3g})")
        if step % record_every == 0 or step == n_steps:
            record(step, theta, phi, res, sysm.regularized_condition)
        if step < n_steps:
            theta = theta + h * dth
    return Trajectory(np.array(taus), np.array(thetas), np.array(fids), np.array(ress), np.array(conds),
                      status, notes)


def reference_theta(ansatz: Ansatz, theta0, H, T: float, lam: float = LAMBDA_REG,
                    phase_correction: bool = False, rtol: float = 1e-11, atol: float = 1e-12) -> np.ndarray:
    """``theta(T)`` of the same equations from a high-accuracy adaptive Runge-Kutta solve."""
    sol = solve_ivp(lambda t, th: theta_dot(ansatz, th, H, lam, phase_correction), (0.0, T),
                    ansatz._check(theta0), method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y[:, -1]


def fit_ansatz(ansatz: Ansatz, target, restarts: int = 8, seed: int = 0, maxiter: int = 2000) -> tuple[np.ndarray, float]:
    """Parameters maximizing ``|<target|phi(theta)>|^2``; returns ``(theta, fidelity)``."""
    tgt = target.amps if isinstance(target, QState) else np.asarray(target, dtype=complex)
    tgt = tgt / np.linalg.norm(tgt)
    rng = np.random.default_rng(seed)

    def loss(th):
        phi, D = ansatz_jacobian(ansatz, th)
        ov = np.vdot(tgt, phi)
        grad = -2 * np.real(np.conj(ov) * (tgt.conj() @ D))
        return 1 - abs(ov) ** 2, grad

    best = (None, -1.0)
    for r in range(restarts):
        th0 = np.zeros(ansatz.n_params) if r == 0 else rng.uniform(-math.pi, math.pi, ansatz.n_params)
        out = optimize.minimize(loss, th0, jac=True, method="L-BFGS-B", options={"maxiter": maxiter, "gtol": 1e-12})
        fid = 1 - out.fun
        if fid > best[1]:
            best = (out.x, fid)
    return best[0], float(best[1])


def pilot_threshold(name: str = "varqrte_pilot.json") -> dict:
    """Pilot calibration record shipped with the package."""
    text = resources.files("propload").joinpath("data", name).read_text()
    return json.loads(text)


PILOT_CONFIG = {
    "n_qubits": 6,
    "layers": 2,
    "grid_L": 4.0,
    "omega": 0.5,
    "T": 0.8,
    "dtau": 1e-3,
    "lam": 1e-2,
    "fit_restarts": 6,
    "fit_seed": 0,
}


def pilot_problem(config: dict | None = None, theta0=None):
    """``(ansatz, H, theta0)`` for the oscillator benchmark started from the four-level ladder."""
    from .gridpdf import Grid
    from .hamiltonian import PotentialSpec, build_hamiltonian
    from .ladder import explicit_four_level

    cfg = {**PILOT_CONFIG, **(config or {})}
    n = cfg["n_qubits"]
    grid = Grid(n, cfg["grid_L"], "symmetric")
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": cfg["omega"]}), grid)
    ansatz = Ansatz(n, cfg["layers"])
    if theta0 is None:
        theta0, _ = fit_ansatz(ansatz, explicit_four_level(n).run(), cfg["fit_restarts"], cfg["fit_seed"])
    return ansatz, H, np.asarray(theta0, dtype=float)


def pilot_run(config: dict | None = None, theta0=None) -> dict:
    """Run the benchmark and summarize the fidelity trajectory."""
    cfg = {**PILOT_CONFIG, **(config or {})}
    ansatz, H, th0 = pilot_problem(cfg, theta0)
    tr = run_varqrte(ansatz, th0, H, cfg["T"], cfg["dtau"], lam=cfg["lam"], record_every=100)
    return {
        "config": cfg,
        "theta0": [float(v) for v in th0],
        "tau": [float(v) for v in tr.tau],
        "fidelity": [float(v) for v in tr.fidelity],
        "final_fidelity": float(tr.fidelity[-1]),
        "status": tr.status,
    }
