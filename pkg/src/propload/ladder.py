"""Ladder initial states and the circuits that prepare them.

A ladder on ``N`` qubits with ``K = 2**k`` levels has amplitude ``f(b)`` on
``|0, b, c>`` and ``f(K - 1 - b)`` on ``|1, b, c>``, where ``b`` runs over the
``k`` qubits after the leading one and ``c`` over the remaining ``N - k - 1``.
With qubit 0 as the most significant bit this is a piecewise-constant profile
that rises to the middle of the grid and falls symmetrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gridpdf import Grid, TargetPdf, amplitude_encode
from .state import Circuit, Gate, QState

__all__ = [
    "LadderError",
    "LadderSpec",
    "r_gate_circuit",
    "validate_angles",
    "angle_levels",
    "monotone_ladder_circuit",
    "arbitrary_ladder_circuit",
    "ladder_vector",
    "ladder_state",
    "ladder_for_pdf",
    "explicit_two_level",
    "explicit_four_level",
    "uniformly_controlled_ry",
]


class LadderError(ValueError):
    """A ladder specification violates its invariants."""


@dataclass(frozen=True)
class LadderSpec:
    """``k`` level exponent, ``N`` qubits, and either ``angles`` or ``levels``."""

    k: int
    N: int
    angles: tuple[float, ...] | None = None
    levels: tuple[float, ...] | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0 <= self.k <= self.N - 1:
            raise LadderError(f"need 0 <= k <= N-1, got k={self.k}, N={self.N}")
        if (self.angles is None) == (self.levels is None):
            raise LadderError("give exactly one of angles or levels")
        if self.angles is not None:
            a = tuple(float(t) for t in self.angles)
            object.__setattr__(self, "angles", a)
            if len(a) != self.k:
                raise LadderError(f"expected {self.k} angles, got {len(a)}")
        else:
            lv = tuple(float(v) for v in self.levels)
            object.__setattr__(self, "levels", lv)
            if len(lv) != 2**self.k:
                raise LadderError(f"expected {2**self.k} levels, got {len(lv)}")
            if any(v < 0 for v in lv) or max(lv) <= 0:
                raise LadderError("levels must be non-negative with at least one positive")
            if any(b <= a for a, b in zip(lv, lv[1:])):
                raise LadderError("levels must be strictly increasing")

    @property
    def K(self) -> int:
        return 2**self.k

    def level_values(self) -> np.ndarray:
        if self.levels is not None:
            return np.asarray(self.levels)
        return angle_levels(self.angles)


def r_gate_circuit(theta: float, q1: int, q2: int, n_qubits: int | None = None) -> Circuit:
    """Four-gate realization ``C1(pi/2 - theta) C2(theta)`` of the ladder rotation.

    ``C2(theta) = (X x I) C1(theta) (X x I)`` rotates qubit ``q2`` when ``q1`` is 0.
    """
    if not 0 < theta < np.pi / 2:
        raise LadderError("theta must lie in (0, pi/2)")
    n = n_qubits if n_qubits is not None else max(q1, q2) + 1
    return Circuit(n, [
        Gate.x(q1),
        Gate.crot(q1, q2, theta),
        Gate.x(q1),
        Gate.crot(q1, q2, np.pi / 2 - theta),
    ])


def validate_angles(angles: Sequence[float]) -> list[str]:
    """Problems that keep an angle set from producing a strictly monotone ladder.

    Each angle must lie in ``(pi/4, pi/2)``, the angles must strictly decrease,
    and ``cot(theta_i) < cot(theta_{i+1})**2``.  Returns an empty list when valid.
    """
    problems = []
    th = [float(t) for t in angles]
    for i, t in enumerate(th):
        if not np.pi / 4 < t < np.pi / 2:
            problems.append(f"theta_{i + 1}={t:.6g} outside (pi/4, pi/2)")
    for i in range(len(th) - 1):
        if not th[i] > th[i + 1]:
            problems.append(f"theta_{i + 1} <= theta_{i + 2}")
        elif not 1 / math.tan(th[i]) < (1 / math.tan(th[i + 1])) ** 2:
            problems.append(f"cot(theta_{i + 1}) >= cot(theta_{i + 2})^2")
    return problems


def angle_levels(angles: Sequence[float]) -> np.ndarray:
    """Unnormalized levels ``f(b)`` produced by the monotone circuit.

    ``f(b) = prod_{i in b} sin(theta_i) prod_{i not in b} cos(theta_i)`` with
    ``theta_1`` acting on the most significant bit of ``b``.
    """
    k = len(angles)
    f = np.ones(2**k)
    b = np.arange(2**k)
    for i, t in enumerate(angles):
        bit = (b >> (k - 1 - i)) & 1
        f *= np.where(bit == 1, math.sin(t), math.cos(t))
    return f


def monotone_ladder_circuit(spec: LadderSpec, check: bool = True) -> Circuit:
    """``N + 3k`` gate circuit for an angle-form ladder.

    Hadamards on qubit 0 and on qubits ``k+1..N-1``, then the rotation
    ``R(theta_j)`` between qubit 0 and qubit ``j`` for ``j = 1..k``.
    """
    if spec.angles is None:
        raise LadderError("monotone circuit needs the angle form")
    if check:
        problems = validate_angles(spec.angles)
        if problems:
            raise LadderError("; ".join(problems))
    N, k = spec.N, spec.k
    circ = Circuit(N, [Gate.h(0)] + [Gate.h(q) for q in range(k + 1, N)])
    for j, theta in enumerate(spec.angles, start=1):
        circ.extend(r_gate_circuit(theta, 0, j, N).gates)
    return circ


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def uniformly_controlled_ry(alphas: Sequence[float], controls: Sequence[int], target: int) -> list[Gate]:
    """Ry(alpha_p) on ``target`` for each control pattern ``p`` (first control = MSB of ``p``).

    Decomposed into ``2**j`` single-qubit Ry gates and ``2**j`` CNOTs with a
    Gray-code ordering.
    """
    j = len(controls)
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size != 2**j:
        raise ValueError("need 2**len(controls) angles")
    if j == 0:
        return [Gate.ry(target, alphas[0])]
    n = 2**j
    # theta'_i = 2^-j sum_p (-1)^{popcount(p & gray(i))} alpha_p
    signs = np.array([[(-1) ** bin(p & _gray(i)).count("1") for p in range(n)] for i in range(n)])
    thetas = signs @ alphas / n
    gates = []
    for i in range(n):
        gates.append(Gate.ry(target, thetas[i]))
        changed = _gray(i) ^ _gray((i + 1) % n)
        bit = changed.bit_length() - 1  # bit position within p (0 = LSB)
        gates.append(Gate.cnot(controls[j - 1 - bit], target))
    return gates


def ladder_vector(spec: LadderSpec) -> np.ndarray:
    """Normalized target amplitudes of the ladder on ``N`` qubits."""
    f = spec.level_values()
    head = np.concatenate([f, f[::-1]])  # |0,b> then |1,b> = f(K-1-b)
    vec = np.repeat(head, 2 ** (spec.N - spec.k - 1))
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise LadderError("ladder vanishes")
    return vec / nrm


def arbitrary_ladder_circuit(spec: LadderSpec) -> Circuit:
    """Prepare any level-form ladder with a binary-split Ry loader on ``k + 1`` qubits.

    Gate count is ``N - k - 1`` Hadamards plus ``1 + sum_{j=1..k} 2**(j+1)`` loader
    gates, i.e. at most ``N + 4K``.
    """
    f = spec.level_values()
    m = spec.k + 1
    head = np.concatenate([f, f[::-1]])
    head = head / np.linalg.norm(head)
    circ = Circuit(spec.N)
    for j in range(m):
        block = 2 ** (m - j)
        parts = head.reshape(2**j, block)
        total = np.linalg.norm(parts, axis=1)
        left = np.linalg.norm(parts[:, : block // 2], axis=1)
        ratio = np.divide(left, total, out=np.ones_like(left), where=total > 0)
        alphas = 2 * np.arccos(np.clip(ratio, -1.0, 1.0))
        circ.extend(uniformly_controlled_ry(alphas, list(range(j)), j))
    circ.extend(Gate.h(q) for q in range(m, spec.N))
    return circ


def ladder_state(spec: LadderSpec) -> QState:
    circ = monotone_ladder_circuit(spec, check=False) if spec.angles is not None else arbitrary_ladder_circuit(spec)
    return circ.run()


def _central_derivative(p: np.ndarray, dx: float) -> np.ndarray:
    d = np.empty_like(p)
    d[1:-1] = (p[2:] - p[:-2]) / (2 * dx)
    d[0] = (p[1] - p[0]) / dx
    d[-1] = (p[-1] - p[-2]) / dx
    return d


def _block_levels(p: np.ndarray, N: int, k: int) -> np.ndarray:
    blk = 2 ** (N - k - 1)
    g = np.sqrt(np.sum(p[: 2**k * blk].reshape(2**k, blk) ** 2, axis=1))
    Y = math.sqrt(2 * float(np.sum(g**2)))
    return g / Y


def ladder_for_pdf(target: TargetPdf, grid: Grid, eps: float) -> LadderSpec:
    """Level-form ladder whose state is within ``eps`` (2-norm) of the density encoding.

    ``k = min(N-1, ceil(log2(M L / (eps min p))))`` with ``M`` the largest
    central-difference slope of ``p`` on the grid.  Levels are the block
    root-sum-squares ``g(b)`` of ``p`` over the left half, divided by
    ``Y = sqrt(2 sum g^2)``.  ``info`` records ``M``, ``min_p``, the uncapped ``k``,
    the achieved error and the smallest ``k`` that already meets ``eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if grid.support != "symmetric":
        raise LadderError("ladder_for_pdf needs a symmetric grid")
    x = grid.x
    p = np.asarray(target(x), dtype=float)
    if np.any(p <= 0):
        raise LadderError("target must be positive on the grid interval")
    if not np.allclose(p, p[::-1], rtol=1e-10, atol=0):
        raise LadderError("target must be even about the grid centre")
    half = p[: grid.size // 2]
    if np.any(np.diff(half) < -1e-15 * np.max(p)):
        raise LadderError("target must be non-decreasing towards the centre")
    M = float(np.max(np.abs(_central_derivative(p, grid.delta))))
    pmin = float(np.min(p))
    ratio = M * grid.L / (eps * pmin)
    k_uncapped = 0 if ratio <= 1 else int(math.ceil(math.log2(ratio)))
    k = min(grid.N - 1, k_uncapped)
    pref = amplitude_encode(target, grid, "density").state.amps.real

    def err(kk):
        lv = _block_levels(p, grid.N, kk)
        vec = np.repeat(np.concatenate([lv, lv[::-1]]), 2 ** (grid.N - kk - 1))
        return float(np.linalg.norm(vec / np.linalg.norm(vec) - pref)), lv

    achieved, levels = err(k)
    k_min = next((kk for kk in range(grid.N) if err(kk)[0] < eps), None)
    if np.all(np.diff(levels) > 0) or k == 0:
        lv = levels
    else:
        # flat stretches (e.g. a uniform target) collapse to fewer levels
        raise LadderError("block levels are not strictly increasing; use a smaller k")
    info = {"M": M, "min_p": pmin, "k_uncapped": k_uncapped, "error": achieved, "k_min": k_min}
    return LadderSpec(k, grid.N, levels=tuple(lv), info=info)


def explicit_two_level(N: int) -> Circuit:
    """``(|01> + |10>)/sqrt2`` on qubits 0, 1, then Hadamards on the rest."""
    if N < 2:
        raise LadderError("two-level ladder needs N >= 2")
    return Circuit(N, [Gate.x(1), Gate.h(0), Gate.cnot(0, 1)] + [Gate.h(q) for q in range(2, N)])


def explicit_four_level(N: int) -> Circuit:
    """``(|010> + sqrt7|011> + sqrt7|100> + |101>)/4`` on qubits 0..2, then Hadamards."""
    if N < 3:
        raise LadderError("four-level ladder needs N >= 3")
    alpha = 2 * math.acos(1 / (2 * math.sqrt(2)))
    return Circuit(
        N,
        [Gate.x(1), Gate.h(0), Gate.cnot(0, 1), Gate.ry(2, alpha), Gate.cnot(0, 2)]
        + [Gate.h(q) for q in range(3, N)],
    )
