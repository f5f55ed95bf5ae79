"""Trotter, fast-forward and ground-state projection."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propload.evolve import (
    TrotterPlan, dense_propagator, evolve_dense, evolve_trotter, fastforward_qho, project_ground, qpe_distribution,
    trotter_circuit, trotter_step,
)
from propload.gridpdf import Grid
from propload.hamiltonian import DiscreteHamiltonian, PotentialSpec, build_hamiltonian
from propload.state import QState


def packet(g, c=1.0):
    v = np.exp(-(g.x - c) ** 2).astype(complex)
    return v / np.linalg.norm(v)


def test_plan_step_rule():
    p = TrotterPlan(1.0, 1e-2)
    assert p.dt == pytest.approx(0.1) and p.n_steps == 10
    assert TrotterPlan(0.0, 1e-3).n_steps == 0
    with pytest.raises(ValueError):
        TrotterPlan(1.0, 0.0)


def test_free_step_exact():
    g = Grid(6, 4.0)
    H = DiscreteHamiltonian(g, np.zeros(g.size))
    v = packet(g)
    np.testing.assert_allclose(trotter_step(v, H, 0.7), evolve_dense(v, H, 0.7), atol=1e-12)


def test_fourier_mode_phase():
    g = Grid(5, 3.0)
    H = DiscreteHamiltonian(g, np.zeros(g.size))
    j = 3
    mode = np.exp(2j * math.pi * j * np.arange(g.size) / g.size) / math.sqrt(g.size)
    out = trotter_step(mode, H, 0.4)
    np.testing.assert_allclose(out, np.exp(-0.4j * H.kinetic_spectrum()[j]) * mode, atol=1e-12)


def test_circuit_matches_step():
    g = Grid(5, 4.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    v = packet(g)
    out = trotter_circuit(H, 0.05).run(QState(5, v)).amps
    np.testing.assert_allclose(out, trotter_step(v, H, 0.05), atol=1e-12)


def test_local_error_is_third_order():
    g = Grid(6, 5.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    v = packet(g)
    errs = [np.linalg.norm(trotter_step(v, H, dt) - evolve_dense(v, H, dt)) for dt in (0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(8, rel=0.1)


def test_global_error_tracks_eps():
    g = Grid(6, 5.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    v = packet(g)
    ref = evolve_dense(v, H, 1.0)
    for eps in (1e-2, 1e-3):
        assert np.linalg.norm(evolve_trotter(v, H, 1.0, eps) - ref) <= 3 * eps


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), t=st.floats(0.05, 2.0))
def test_trotter_linear_and_unitary(seed, t):
    g = Grid(4, 3.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    rng = np.random.default_rng(seed)
    a = rng.normal(size=g.size) + 1j * rng.normal(size=g.size)
    b = rng.normal(size=g.size) + 1j * rng.normal(size=g.size)
    ea, eb = evolve_trotter(a, H, t, 1e-2), evolve_trotter(b, H, t, 1e-2)
    np.testing.assert_allclose(evolve_trotter(a + 2j * b, H, t, 1e-2), ea + 2j * eb, atol=1e-10)
    assert np.linalg.norm(ea) == pytest.approx(np.linalg.norm(a), rel=1e-12)


def test_state_size_mismatch():
    g = Grid(4, 3.0)
    H = DiscreteHamiltonian(g, np.zeros(g.size))
    with pytest.raises(ValueError):
        evolve_trotter(np.ones(8), H, 1.0, 1e-2)


def test_fastforward_matches_spectral_oscillator():
    g = Grid(8, 6.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    v = packet(g)
    for t in (0.1, 0.5, 1.3):
        ex = evolve_dense(v, H, t)
        assert 1 - abs(np.vdot(ex, fastforward_qho(v, t, g))) ** 2 < 1e-6


def test_fastforward_composition_and_norm():
    g = Grid(7, 6.0)
    v = packet(g)
    a = fastforward_qho(fastforward_qho(v, 0.3, g), 0.45, g)
    b = fastforward_qho(v, 0.75, g)
    assert abs(abs(np.vdot(a, b)) - 1) < 1e-8
    assert np.linalg.norm(b) == pytest.approx(1, abs=1e-13)
    np.testing.assert_allclose(fastforward_qho(v, 0.0, g), v)


def test_fastforward_period():
    # period 2 pi / omega returns the state up to a global phase
    g = Grid(8, 6.0)
    v = packet(g)
    out = fastforward_qho(v, math.pi, g)
    assert abs(np.vdot(v, out)) ** 2 > 1 - 1e-8


def test_fastforward_needs_symmetric_grid():
    g = Grid(4, 3.0, "positive")
    with pytest.raises(ValueError):
        fastforward_qho(np.ones(16), 0.5, g)


def test_trotter_agrees_with_fastforward():
    g = Grid(7, 6.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    v = packet(g)
    a = evolve_trotter(v, H, 0.8, 1e-5)
    b = fastforward_qho(v, 0.8, g)
    assert 1 - abs(np.vdot(a, b)) ** 2 < 1e-5


def test_dense_propagator_unitary():
    g = Grid(4, 3.0)
    U = dense_propagator(build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g), 0.9)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(g.size), atol=1e-12)


def _oscillator(N=6, L=4.0):
    g = Grid(N, L)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    w, U = np.linalg.eigh(H.dense())
    return g, H, w, U, (lambda v, t: evolve_dense(v, H, t))


def test_qpe_eigenstate_single_bin():
    g, H, w, U, prop = _oscillator()
    m = 5
    t0 = 2 * math.pi / 2**m
    joint = qpe_distribution(U[:, 0], prop, t0, m)
    probs = np.sum(np.abs(joint) ** 2, axis=1)
    assert probs.sum() == pytest.approx(1)
    assert int(np.argmax(probs)) == int(round(w[0] * t0 * 2**m / (2 * math.pi))) % 2**m


def test_projection_of_eigenstate_is_certain():
    g, H, w, U, prop = _oscillator()
    # t0 chosen so the ground energy lands exactly on a bin
    m = 4
    t0 = 2 * math.pi / 2**m / w[0]
    est = project_ground(U[:, 0], prop, t0, m, shots=200, seed=1, ground_energy=w[0])
    assert est.p_ground == pytest.approx(1, abs=1e-10)
    assert est.success_rate == 1.0
    assert abs(np.vdot(U[:, 0], est.state.amps)) ** 2 == pytest.approx(1)


def test_projection_improves_overlap():
    g, H, w, U, prop = _oscillator()
    v = packet(g, 0.5)
    est = project_ground(v, prop, 2 * math.pi / 64, 6, shots=500, seed=0, ground_energy=w[0])
    overlap = abs(np.vdot(U[:, 0], v)) ** 2
    assert abs(np.vdot(U[:, 0], est.state.amps)) ** 2 > max(overlap, 0.99)
    assert est.p_ground >= overlap - 1e-9
    assert est.to_dict()["shots"] == 500


def test_projection_is_seeded():
    g, H, w, U, prop = _oscillator(5, 3.0)
    v = packet(g, 0.5)
    a = project_ground(v, prop, 2 * math.pi / 16, 4, shots=300, seed=7)
    b = project_ground(v, prop, 2 * math.pi / 16, 4, shots=300, seed=7)
    assert np.array_equal(a.counts, b.counts)


def test_projection_gap_warning():
    g, H, w, U, prop = _oscillator(5, 3.0)
    with pytest.warns(RuntimeWarning):
        est = project_ground(packet(g), prop, 2 * math.pi / 16, 2, shots=10, gap=0.5)
    assert est.status == "warning"
    with pytest.raises(ValueError):
        project_ground(packet(g), prop, 0.1, 0)
