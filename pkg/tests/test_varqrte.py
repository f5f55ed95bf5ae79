"""Variational real-time evolution."""
import math

import numpy as np
import pytest

from propload.gridpdf import Grid
from propload.hamiltonian import PotentialSpec, build_hamiltonian
from propload.varqrte import (
    Ansatz, McLachlanSystem, ansatz_deriv, ansatz_jacobian, ansatz_state, fit_ansatz, mclachlan_system,
    pilot_threshold, reference_theta, run_varqrte, theta_dot,
)


def test_ansatz_circuit_matches_fast_path():
    a = Ansatz(3, 2)
    th = np.random.default_rng(0).uniform(-3, 3, a.n_params)
    phi, D = ansatz_jacobian(a, th)
    np.testing.assert_allclose(a.circuit(th).run().amps, phi, atol=1e-12)
    np.testing.assert_allclose(ansatz_state(a, th).amps, phi, atol=1e-12)
    assert D.shape == (8, a.n_params)


def test_jacobian_matches_finite_differences():
    a = Ansatz(3, 1)
    th = np.random.default_rng(1).uniform(-3, 3, a.n_params)
    _, D = ansatz_jacobian(a, th)
    h = 1e-6
    for k in range(a.n_params):
        e = np.zeros(a.n_params)
        e[k] = h
        fd = (ansatz_state(a, th + e).amps - ansatz_state(a, th - e).amps) / (2 * h)
        np.testing.assert_allclose(D[:, k], fd, atol=1e-8)
        np.testing.assert_allclose(ansatz_deriv(a, th, k), D[:, k], atol=1e-12)


def test_bad_parameter_length():
    a = Ansatz(2, 1)
    with pytest.raises(ValueError):
        ansatz_state(a, np.zeros(a.n_params + 1))


def test_regularized_solve():
    sysm = McLachlanSystem(np.diag([1.0, 0.0]), np.array([1.0, 1.0]), 1e-2)
    dth, res, status = sysm.solve()
    np.testing.assert_allclose(dth, [1 / 1.01, 100.0], rtol=1e-10)
    assert sysm.condition == math.inf or sysm.condition > 1e12
    assert sysm.regularized_condition == pytest.approx(101.0)


def _problem(n=3, layers=2):
    g = Grid(n, 3.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    a = Ansatz(n, layers)
    th = np.random.default_rng(2).uniform(-1, 1, a.n_params)
    return a, H, th


def test_mclachlan_equations_shape_and_symmetry():
    a, H, th = _problem()
    sysm = mclachlan_system(a, th, H)
    assert sysm.M.shape == (a.n_params, a.n_params)
    np.testing.assert_allclose(sysm.M, sysm.M.T)
    assert theta_dot(a, th, H).shape == (a.n_params,)


def test_euler_converges_to_reference():
    a, H, th = _problem()
    T = 0.05
    ref = reference_theta(a, th, H, T)
    errs = [np.linalg.norm(run_varqrte(a, th, H, T, d).theta[-1] - ref) for d in (1e-3, 5e-4)]
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.2)


def test_fidelity_starts_at_one_and_trajectory_csv():
    a, H, th = _problem()
    tr = run_varqrte(a, th, H, 0.02, 1e-3, record_every=5)
    assert tr.fidelity[0] == pytest.approx(1)
    assert np.all(tr.fidelity <= 1 + 1e-12)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "tau,fidelity,residual,cond" and len(lines) == len(tr.tau) + 1
    assert np.all(np.isfinite(tr.cond))


def test_full_ansatz_tracks_exact_evolution():
    # a universal enough ansatz on one qubit follows the exact state closely
    g = Grid(1, 2.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    a = Ansatz(1, 2)
    th = np.array([0.3, 0.2, -0.4, 0.1][: a.n_params] + [0.0] * max(0, a.n_params - 4))
    tr = run_varqrte(a, th, H, 0.5, 1e-3, lam=1e-8, record_every=100)
    assert tr.fidelity[-1] > 0.999


def test_fit_ansatz_reaches_reachable_target():
    a = Ansatz(2, 2)
    target = ansatz_state(a, np.random.default_rng(5).uniform(-2, 2, a.n_params))
    th, fid = fit_ansatz(a, target, restarts=4)
    assert fid > 1 - 1e-8


def test_pilot_record():
    rec = pilot_threshold()
    assert rec["final_fidelity"] >= rec["threshold"] > 0.5
    assert len(rec["theta0"]) == Ansatz(rec["config"]["n_qubits"], rec["config"]["layers"]).n_params
