"""Minimal statevector simulator.

Qubit 0 is the most significant bit of the basis index, so the basis state
``|q0 q1 ... q_{n-1}>`` has index ``q0 * 2**(n-1) + ... + q_{n-1}``.  States are
immutable: every operation returns a new :class:`QState`.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "QState",
    "Gate",
    "Circuit",
    "GATE_KINDS",
    "apply",
    "qft",
    "iqft",
    "probabilities",
    "inner",
    "fidelity",
    "gate_matrix",
    "r_matrix",
    "state_to_csv",
    "state_to_json",
    "state_from_json",
]

UNITARY_TOL = 1e-12
NORM_TOL = 1e-9

GATE_KINDS = ("H", "X", "Y", "Z", "Rx", "Ry", "Rz", "CNOT", "CRot", "R2", "DiagPhase", "QFT", "IQFT")

_SQ2 = 1.0 / np.sqrt(2.0)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QState:
    """Normalized amplitude vector on ``n_qubits`` qubits."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        a = np.asarray(self.amps)
        if a.ndim != 1 or a.shape[0] != 2**self.n_qubits:
            raise ValueError(f"amplitude vector must have length 2**{self.n_qubits}, got shape {a.shape}")
        object.__setattr__(self, "amps", _readonly(a))

    @classmethod
    def zero(cls, n_qubits: int) -> "QState":
        a = np.zeros(2**n_qubits, dtype=complex)
        a[0] = 1.0
        return cls(n_qubits, a)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "QState":
        if not 0 <= index < 2**n_qubits:
            raise IndexError(f"basis index {index} out of range")
        a = np.zeros(2**n_qubits, dtype=complex)
        a[index] = 1.0
        return cls(n_qubits, a)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], normalize: bool = True) -> "QState":
        a = np.asarray(amps, dtype=complex)
        n = int(round(np.log2(a.size)))
        if 2**n != a.size:
            raise ValueError("amplitude vector length must be a power of two")
        if normalize:
            nrm = np.linalg.norm(a)
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            a = a / nrm
        return cls(n, a)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2,) * n_qubits`` (axis ``q`` is qubit ``q``)."""
        return self.amps.reshape((2,) * self.n_qubits)


@dataclass(frozen=True)
class Gate:
    """One gate.  ``qubits`` lists the acted-on qubits in order (control first)."""

    kind: str
    qubits: tuple[int, ...] = ()
    theta: float = 0.0
    phases: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = {"CNOT": 2, "CRot": 2, "R2": 2, "DiagPhase": 0, "QFT": 0, "IQFT": 0}.get(self.kind, 1)
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError("two-qubit gate needs distinct qubits")
        if self.kind == "DiagPhase":
            if self.phases is None:
                raise ValueError("DiagPhase requires a phase vector")
            object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))

    # convenience constructors
    @staticmethod
    def h(q): return Gate("H", (q,))
    @staticmethod
    def x(q): return Gate("X", (q,))
    @staticmethod
    def rx(q, theta): return Gate("Rx", (q,), float(theta))
    @staticmethod
    def ry(q, theta): return Gate("Ry", (q,), float(theta))
    @staticmethod
    def rz(q, theta): return Gate("Rz", (q,), float(theta))
    @staticmethod
    def cnot(c, t): return Gate("CNOT", (c, t))
    @staticmethod
    def crot(c, t, theta): return Gate("CRot", (c, t), float(theta))
    @staticmethod
    def r2(q1, q2, theta): return Gate("R2", (q1, q2), float(theta))
    @staticmethod
    def diag(phases): return Gate("DiagPhase", (), 0.0, np.asarray(phases, dtype=float))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.kind in ("Rx", "Ry", "Rz", "CRot", "R2"):
            d["theta"] = self.theta
        if self.kind == "DiagPhase":
            d["phases"] = self.phases.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(d["kind"], tuple(d.get("qubits", ())), float(d.get("theta", 0.0)), d.get("phases"))


def r_matrix(theta: float) -> np.ndarray:
    """The 4x4 ladder gate: ``C1(pi/2 - theta) C2(theta)``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[c, -s, 0, 0],
         [s, c, 0, 0],
         [0, 0, s, -c],
         [0, 0, c, s]],
        dtype=complex,
    )


def _rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Local unitary of a one- or two-qubit gate (first listed qubit is the MSB)."""
    k, th = gate.kind, gate.theta
    if k == "H":
        return _H.copy()
    if k == "X":
        return _X.copy()
    if k == "Y":
        return _Y.copy()
    if k == "Z":
        return _Z.copy()
    if k in ("Rx", "Ry", "Rz"):
        sigma = {"Rx": _X, "Ry": _Y, "Rz": _Z}[k]
        return np.cos(th / 2) * np.eye(2) - 1j * np.sin(th / 2) * sigma
    if k == "CNOT":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _X
        return m
    if k == "CRot":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _rot(th)
        return m
    if k == "R2":
        return r_matrix(th)
    raise ValueError(f"{k} has no local matrix")


def _apply_local(t: np.ndarray, u: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    m = len(qubits)
    u = u.reshape((2,) * (2 * m))
    out = np.tensordot(u, t, axes=(list(range(m, 2 * m)), list(qubits)))
    return np.moveaxis(out, list(range(m)), list(qubits))


def qft(state: QState) -> QState:
    """Unitary DFT ``(QFT a)_k = sum_j a_j exp(2 pi i j k / N) / sqrt(N)``."""
    return QState(state.n_qubits, np.fft.ifft(state.amps, norm="ortho"))


def iqft(state: QState) -> QState:
    return QState(state.n_qubits, np.fft.fft(state.amps, norm="ortho"))


def apply(state: QState, gate: Gate) -> QState:
    """Return ``U |state>`` for the gate's unitary ``U``."""
    n = state.n_qubits
    for q in gate.qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")
    if gate.kind == "QFT":
        return qft(state)
    if gate.kind == "IQFT":
        return iqft(state)
    if gate.kind == "DiagPhase":
        if gate.phases.shape != (state.dim,):
            raise ValueError("phase vector length must equal the state dimension")
        return QState(n, state.amps * np.exp(1j * gate.phases))
    t = _apply_local(state.tensor(), gate_matrix(gate), gate.qubits)
    return QState(n, t.reshape(-1))


@dataclass
class Circuit:
    """Ordered gate list on a fixed register."""

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate):
        if any(q >= self.n_qubits or q < 0 for q in g.qubits):
            raise IndexError(f"gate {g.kind}{g.qubits} outside {self.n_qubits}-qubit register")

    def append(self, g: Gate) -> "Circuit":
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def run(self, state: QState | None = None) -> QState:
        s = QState.zero(self.n_qubits) if state is None else state
        if s.n_qubits != self.n_qubits:
            raise ValueError("state and circuit registers differ")
        for g in self.gates:
            s = apply(s, g)
        return s

    def matrix(self) -> np.ndarray:
        """Dense unitary, built column by column (small registers only)."""
        d = 2**self.n_qubits
        cols = [self.run(QState.basis(self.n_qubits, j)).amps for j in range(d)]
        return np.stack(cols, axis=1)

    def count(self, kinds: Iterable[str] | None = None) -> int:
        if kinds is None:
            return len(self.gates)
        kinds = set(kinds)
        return sum(g.kind in kinds for g in self.gates)

    def to_json(self) -> str:
        return json.dumps({"n_qubits": self.n_qubits, "gates": [g.to_dict() for g in self.gates]})

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        d = json.loads(text)
        return cls(d["n_qubits"], [Gate.from_dict(g) for g in d["gates"]])


def probabilities(state: QState) -> np.ndarray:
    return np.abs(state.amps) ** 2


def inner(a: QState, b: QState) -> complex:
    """Sesquilinear product ``<a|b>``."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a, b) -> float:
    """``|<a|b>|^2`` for states or raw normalized vectors."""
    va = a.amps if isinstance(a, QState) else np.asarray(a)
    vb = b.amps if isinstance(b, QState) else np.asarray(b)
    if va.shape != vb.shape:
        raise ValueError("dimension mismatch")
    return float(abs(np.vdot(va, vb)) ** 2)


def state_to_csv(state: QState) -> str:
    buf = io.StringIO()
    buf.write("index,re,im\n")
    for i, a in enumerate(state.amps):
        buf.write(f"{i},{a.real:.17g},{a.imag:.17g}\n")
    return buf.getvalue()


def state_to_json(state: QState) -> str:
    return json.dumps([[float(a.real), float(a.imag)] for a in state.amps])


def state_from_json(text: str) -> QState:
    pairs = np.asarray(json.loads(text), dtype=float)
    return QState.from_amplitudes(pairs[:, 0] + 1j * pairs[:, 1], normalize=False)
