"""Closed-form propagators, evolved states and eigen-expansions."""
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.linalg import eigh_tridiagonal

from propload.analytic import (
    CausticError, EigenSystem, InitialState, Kernel, closed_form, delta_bound_state, evolve_eigenbasis,
    evolve_quadrature, probability_mass, upsilon_beta_series, upsilon_lemma, upsilon_quadrature,
)
from propload.hamiltonian import PotentialSpec
from propload.verify import composition_error, hardy_hille_error


def test_free_kernel_formula():
    K = Kernel("free", {}, hbar=1.3, m=0.7)
    x, y, t = 0.4, -0.9, 0.6
    ref = math.sqrt(0.7 / (2 * math.pi * 1.3 * t)) * np.exp(-0.25j * math.pi) * np.exp(1j * 0.7 * (x - y) ** 2 / (2 * 1.3 * t))
    assert K(x, y, t) == pytest.approx(ref, rel=1e-13)


def test_harmonic_kernel_small_omega_is_free():
    x, y, t = 0.3, 1.1, 0.8
    a = Kernel("harmonic", {"omega": 1e-5})(x, y, t)
    assert a == pytest.approx(Kernel("free")(x, y, t), rel=1e-8)


def test_halfline_kernel_vanishes_at_wall():
    assert abs(Kernel("halfline")(0.0, 1.2, 0.5)) < 1e-15


def test_caustic_and_bad_times():
    K = Kernel("harmonic", {"omega": 1.0})
    with pytest.raises(CausticError):
        K(0.1, 0.2, math.pi)
    with pytest.raises(ValueError):
        K(0.1, 0.2, -1.0)
    with pytest.raises(ValueError):
        Kernel("radial", {"omega": 1.0, "lam": 0.5})(1.0, 1.0, 0.5 - 0.1j)
    with pytest.raises(ValueError):
        Kernel("radial", {"omega": 1.0})


def test_from_potential():
    assert Kernel.from_potential(PotentialSpec("zero", {}), half_line=True).kind == "halfline"
    assert Kernel.from_potential(PotentialSpec("zero", {}), box=2.0).params == {"b": 2.0}
    with pytest.raises(ValueError):
        Kernel.from_potential(PotentialSpec("coulomb", {"e1e2": 1.0}))


@pytest.mark.parametrize("kind,params", [
    ("plateau", {}), ("fourlevel", {}), ("gausspow", {"a": 0.5, "b": 2}), ("gamma", {"a": 1.0, "b": 2.0}),
    ("truncgauss", {"b": 1.5}), ("triangular", {"a": 2.0}), ("sinepi", {}), ("coulombgamma", {}),
    ("deltabound", {"a": 0.8}), ("gausspow_half", {"a": 1.0, "b": 1.5}),
])
def test_initial_states_normalized(kind, params):
    psi = InitialState(kind, params)
    lo, hi = psi.support
    lo, hi = max(lo, -60), min(hi, 60)
    val, _ = integrate.quad(lambda y: abs(psi(y)) ** 2, lo, hi, points=[p for p in psi.breaks if lo < p < hi] or None,
                            limit=500)
    assert val == pytest.approx(1, abs=1e-8)


def test_initial_state_validation():
    with pytest.raises(ValueError):
        InitialState("gausspow", {"a": 1.0, "b": 1.5})
    with pytest.raises(ValueError):
        InitialState("gamma", {"a": -1.0, "b": 2.0})
    with pytest.raises(ValueError):
        InitialState("blocks", {"blocks": ((0.0, 1.0, 2.0),)})


@pytest.mark.parametrize("kernel,psi0,t", [
    (Kernel("free"), InitialState("gausspow", {"a": 0.5, "b": 2}), 0.7),
    (Kernel("halfline"), InitialState("gausspow_half", {"a": 1.0, "b": 1.5}), 0.4),
    (Kernel("linear", {"k": 0.6}), InitialState("gamma", {"a": 1.0, "b": 2.0}), 0.5),
    (Kernel("harmonic", {"omega": 0.5}), InitialState("plateau"), 0.8),
    (Kernel("harmonic", {"omega": 0.5}), InitialState("fourlevel"), 1.25),
    (Kernel("radial", {"omega": 0.5, "lam": 0.75}), InitialState("gausspow_half", {"a": 1.0, "b": 1.5}), 0.6),
])
def test_closed_form_matches_quadrature(kernel, psi0, t):
    x = np.array([0.3, 0.9, 1.7])
    np.testing.assert_allclose(closed_form(kernel, psi0, t, x), evolve_quadrature(kernel, psi0, t, x), atol=2e-7)


def test_displaced_ground_state_follows_classical_path():
    w, x0, t = 1.3, 0.8, 0.9
    psi0 = InitialState("gaussshift", {"x0": x0, "omega": w})
    x = np.linspace(-6, 6, 4001)
    rho = np.abs(closed_form(Kernel("harmonic", {"omega": w}), psi0, t, x)) ** 2
    d = x[1] - x[0]
    assert np.sum(rho) * d == pytest.approx(1, abs=1e-10)
    assert np.sum(x * rho) * d == pytest.approx(x0 * math.cos(w * t), abs=1e-10)


def test_plateau_spreads_towards_normal():
    x = np.linspace(-5, 5, 201)
    psi = closed_form(Kernel("harmonic", {"omega": 0.5}), InitialState("plateau"), 0.8, x)
    rho = np.abs(psi) ** 2
    assert abs(rho[100] - 1 / math.sqrt(2 * math.pi)) < 0.05


def test_delta_bound_state():
    x = np.linspace(-30, 30, 60001)
    psi = delta_bound_state(0.7, x, t=1.0)
    assert probability_mass(psi, x) == pytest.approx(1, abs=1e-6)
    # stationary: time only adds the phase exp(i m a^2 t / 2 hbar^3)
    np.testing.assert_allclose(psi / delta_bound_state(0.7, x), np.exp(0.5j * 0.49), rtol=1e-12)
    assert closed_form(PotentialSpec("delta", {"a": 0.7}), None, 1.0, 0.0) == pytest.approx(psi[30000])


def test_upsilon_three_ways():
    args = (0.6 + 0.3j, 0.4, 1.1, 0.75, 1.5)
    q = upsilon_quadrature(*args)
    assert upsilon_lemma(*args) == pytest.approx(q, rel=1e-9)
    assert upsilon_beta_series(*args) == pytest.approx(q, rel=1e-9)
    _, cond = upsilon_lemma(*args, with_condition=True)
    assert cond >= 1


def test_kernel_composition_damped_times():
    for K in (Kernel("free"), Kernel("harmonic", {"omega": 0.7})):
        assert composition_error(K, 0.4 * (1 - 0.05j), 0.6 * (1 - 0.05j), 0.3, -0.5) < 1e-10


def test_hardy_hille_identity():
    assert hardy_hille_error(0.7, 1.3, 0.4, 0.5) < 1e-8


def test_well_energies_and_orthonormality():
    sys = EigenSystem("infinitewell", {"a": 2.0})
    assert sys.energy(3) == pytest.approx(9 * math.pi**2 / 8)
    g = [[integrate.quad(lambda x: sys.eigenfunction(i, x) * sys.eigenfunction(j, x), 0, 2)[0]
          for j in (1, 2, 3)] for i in (1, 2, 3)]
    np.testing.assert_allclose(g, np.eye(3), atol=1e-10)


@pytest.mark.parametrize("kind,params,hi", [
    ("halflinear", {"k": 1.0}, 30.0), ("poschlteller", {"alpha": 1.0, "beta": 1.5}, math.pi / 2),
    ("coulomb", {"e1e2": 1.0}, 120.0),
])
def test_eigenfunctions_orthonormal(kind, params, hi):
    sys = EigenSystem(kind, params)
    ns = range(sys.first, sys.first + 3)
    g = [[integrate.quad(lambda x: sys.eigenfunction(i, x) * sys.eigenfunction(j, x), 0, hi, limit=400)[0]
          for j in ns] for i in ns]
    np.testing.assert_allclose(g, np.eye(3), atol=1e-7)


def _fd_levels(V, hi, n=6000):
    h = hi / (n + 1)
    x = h * np.arange(1, n + 1)
    w = eigh_tridiagonal(1 / h**2 + V(x), -0.5 / h**2 * np.ones(n - 1), select="i", select_range=(0, 2))[0]
    return w


def test_halflinear_energies_by_finite_differences():
    sys = EigenSystem("halflinear", {"k": 1.3})
    fd = _fd_levels(lambda x: 1.3 * x, 20.0)
    np.testing.assert_allclose([sys.energy(n) for n in (1, 2, 3)], fd, rtol=1e-5)


def test_poschl_teller_energies_by_finite_differences():
    al, be = 1.0, 1.5
    sys = EigenSystem("poschlteller", {"alpha": al, "beta": be})
    V = lambda x: 0.5 * (al * al - 0.25) / np.sin(x) ** 2 + 0.5 * (be * be - 0.25) / np.cos(x) ** 2
    fd = _fd_levels(V, math.pi / 2)
    np.testing.assert_allclose([sys.energy(n) for n in (0, 1, 2)], fd, rtol=1e-4)


def test_coulomb_bound_energies():
    sys = EigenSystem("coulomb", {"e1e2": 1.0})
    assert [sys.energy(n) for n in (0, 1)] == pytest.approx([-0.5, -0.125])


def test_eigenbasis_reproduces_initial_state():
    sys = EigenSystem("infinitewell", {"a": math.pi / 2})
    psi0 = InitialState("sinepi")
    x = np.linspace(0.1, 1.2, 7)
    out = evolve_eigenbasis(sys, psi0, 1e-9, x, 200)
    # the state does not vanish at the right wall, so convergence is slow there
    np.testing.assert_allclose(out.real, psi0(x), atol=5e-3)
    c = sys.coefficients(psi0, 200)
    assert 1 - np.sum(np.abs(c) ** 2) < 1e-2


def test_eigenbasis_conserves_probability():
    sys = EigenSystem("halflinear", {"k": 1.0})
    psi0 = InitialState("gamma", {"a": 1.0, "b": 2.0})
    x = np.linspace(0, 25, 2501)[1:]
    psi = evolve_eigenbasis(sys, psi0, 0.7, x, 40)
    assert probability_mass(psi, x) == pytest.approx(1, abs=1e-3)


def test_unsupported_pair():
    with pytest.raises(ValueError):
        closed_form(Kernel("free"), InitialState("plateau"), 0.5, 0.0)
