"""Acceptance criteria, each at its stated tolerance."""
import json
import math

import numpy as np
from scipy.optimize import curve_fit

from propload.analytic import EigenSystem, InitialState, Kernel, closed_form, delta_bound_state
from propload.cli import main
from propload.evolve import evolve_dense, fastforward_qho, project_ground
from propload.gridpdf import Grid, TargetPdf, amplitude_encode, pdf_eval
from propload.hamiltonian import PotentialSpec, build_hamiltonian
from propload.ladder import LadderSpec, explicit_two_level, ladder_for_pdf, ladder_state, monotone_ladder_circuit
from propload.pathint import appendix_report
from propload.specfun import airy_zeros
from propload.varqrte import (
    Ansatz, ansatz_state, mclachlan_system, pilot_problem, pilot_threshold, reference_theta,
    run_varqrte,
)
from propload.verify import TROTTER_CASES, trotter_errors


def _plateau_like(kind, t):
    g = Grid(9, 6.0)
    psi = closed_form(Kernel("harmonic", {"omega": 0.5}), InitialState(kind), t, g.x)
    normal = np.asarray(pdf_eval(TargetPdf("normal"), g.x))
    return float(np.max(np.abs(np.abs(psi) ** 2 - normal)))


def test_c01_plateau_to_normal(report):
    err = _plateau_like("plateau", 0.8)
    assert report(1, err <= 0.045, f"plateau sup density error {err:.4f} <= 0.045")


def test_c02_four_level_to_normal(report):
    err = _plateau_like("fourlevel", 1.25)
    assert report(2, err <= 0.025, f"four-level sup density error {err:.4f} <= 0.025")


def test_c03_maxwell_boltzmann(report):
    g = Grid(9, 6.0, "positive")
    psi = closed_form(Kernel("halfline"), InitialState("gausspow_half", {"a": 1.0, "b": 2.0}), math.sqrt(3) / 2, g.x)
    rho = np.abs(psi) ** 2
    chi3 = np.asarray(pdf_eval(TargetPdf("chi", (3,)), g.x))
    sel = rho > 1e-8
    err = float(np.max(np.abs(rho[sel] - chi3[sel]) / chi3[sel]))
    assert report(3, err <= 1e-6, f"chi-3 relative error {err:.2e} <= 1e-6 on {sel.sum()} points")


def test_c04_laplace(report):
    g = Grid(9, 6.0)
    errs = []
    for b in (1.0, 2.0, 3.0):
        rho = np.abs(delta_bound_state(1 / (2 * b), g.x)) ** 2
        errs.append(float(np.max(np.abs(rho - np.asarray(pdf_eval(TargetPdf("laplace", (0.0, b)), g.x))))))
    err = max(errs)
    assert report(4, err <= 1e-12, f"Laplace density error {err:.2e} <= 1e-12 for b in 1,2,3")


def test_c05_free_gaussian_variance(report):
    x = np.linspace(-20, 20, 8001)
    psi0 = InitialState("gausspow", {"a": 1.0, "b": 1})
    worst = 0.0
    for t in (1.0, 2.0, 3.0):
        rho = np.abs(closed_form(Kernel("free"), psi0, t, x)) ** 2
        gauss = lambda x, s2: np.exp(-x * x / (2 * s2)) / np.sqrt(2 * np.pi * s2)
        (s2,), _ = curve_fit(gauss, x, rho, p0=[1.0])
        worst = max(worst, abs(s2 / ((1 + 4 * t * t) / 4) - 1))
    assert report(5, worst <= 0.01, f"fitted variance relative error {worst:.2e} <= 1e-2")


def test_c06_trotter(report):
    ok, parts = True, []
    for name, case in TROTTER_CASES.items():
        errs = trotter_errors(case, (1e-2, 2.5e-3, 1e-3, 2.5e-4))
        for eps in (1e-2, 1e-3):
            ok &= errs[eps] <= 3 * eps
        r1 = errs[1e-2] / errs[2.5e-3]
        r2 = errs[1e-3] / errs[2.5e-4]
        ok &= 3 <= r1 <= 5 and 3 <= r2 <= 5
        parts.append(f"{name} err {errs[1e-2]:.1e}/{errs[1e-3]:.1e} ratios {r1:.2f},{r2:.2f}")
    assert report(6, ok, "; ".join(parts))


def test_c07_fastforward(report):
    g = Grid(8, 6.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    v = np.exp(-(g.x - 1) ** 2).astype(complex)
    v /= np.linalg.norm(v)
    worst = max(1 - abs(np.vdot(evolve_dense(v, H, t), fastforward_qho(v, t, g))) ** 2 for t in (0.3, 0.8, 1.25))
    assert report(7, worst <= 1e-6, f"worst infidelity {worst:.1e} <= 1e-6")


def test_c08_ladders(report):
    counts_ok, margin = True, math.inf
    for N in range(2, 11):
        for k in range(1, N):
            angles = tuple(math.atan(math.exp(0.01 * 2.1 ** (k - 1 - i))) for i in range(k))
            c = monotone_ladder_circuit(LadderSpec(k, N, angles=angles))
            counts_ok &= len(c) == N + 3 * k
            lv = c.run().amps.real.reshape(2, 2**k, -1)[0, :, 0]
            margin = min(margin, float(np.min(np.diff(lv))))
    g = Grid(10, 5.0)
    ref = amplitude_encode(TargetPdf("normal"), g, "density").state.amps
    dist = [float(np.linalg.norm(ladder_state(ladder_for_pdf(TargetPdf("normal"), g, e)).amps - ref)) for e in (0.1, 0.05)]
    ok = counts_ok and margin > 1e-12 and dist[0] < 0.1 and dist[1] < 0.05
    assert report(8, ok, f"gate counts {'ok' if counts_ok else 'WRONG'}, margin {margin:.1e}, "
                         f"normal ladder distances {dist[0]:.1e}, {dist[1]:.1e}")


def test_c09_projection(report):
    N, m_anc, shots = 8, 6, 1000
    g = Grid(N, 4.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    init = explicit_two_level(N).run()
    w, U = np.linalg.eigh(H.dense())
    overlap = abs(np.vdot(U[:, 0], init.amps)) ** 2
    res = project_ground(init, lambda v, t: fastforward_qho(v, t, g), 2 * math.pi / 2**m_anc, m_anc, shots=shots,
                         seed=0, ground_energy=float(w[0]))
    sigma = math.sqrt(overlap * (1 - overlap) / shots)
    fid = abs(np.vdot(U[:, 0], res.state.amps)) ** 2
    ok = abs(res.success_rate - overlap) <= 3 * sigma and fid >= 0.99
    assert report(9, ok, f"success {res.success_rate:.3f} vs overlap {overlap:.4f} (3 sigma {3 * sigma:.4f}), "
                         f"fidelity {fid:.5f}")


def test_c10_halflinear(report):
    c = EigenSystem("halflinear", {"k": 1.0}).coefficients(InitialState("gamma", {"a": 1.0, "b": 1.0}), 4)
    ce = float(np.max(np.abs(c - [0.714614, -0.230831, 0.227638, -0.168829])))
    ze = float(np.max(np.abs(airy_zeros(6) - [-2.33811, -4.08795, -5.52056, -6.78671, -7.94413, -9.02265])))
    assert report(10, ce <= 1e-4 and ze <= 1e-4, f"coefficient error {ce:.1e}, Airy zero error {ze:.1e} (<= 1e-4)")


def test_c11_appendix(report):
    rows = appendix_report()
    bad = [r.name for r in rows if not r.passed]
    ok = not bad and len(rows) >= 15
    assert report(11, ok, f"{len(rows) - len(bad)}/{len(rows)} closed forms agree with their oracles")


def test_c12_varqrte(report):
    parts, ok = [], True
    # M is PSD and matches a finite-difference Gram matrix
    a = Ansatz(3, 2)
    th = np.random.default_rng(0).uniform(-2, 2, a.n_params)
    g = Grid(3, 3.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 1.0}), g)
    M = mclachlan_system(a, th, H).M
    psd = float(np.min(np.linalg.eigvalsh(M)))
    h = 1e-5
    D = np.column_stack([(ansatz_state(a, th + h * e).amps - ansatz_state(a, th - h * e).amps) / (2 * h)
                         for e in np.eye(a.n_params)])
    gram = float(np.max(np.abs(M - (D.conj().T @ D).real)))
    ok &= psd >= -1e-12 and gram <= 1e-6
    parts.append(f"min eig(M) {psd:.1e}, Gram diff {gram:.1e}")
    # one qubit, Ry ansatz, H = Y: exact solution theta(t) = theta0 + 2t
    a1 = Ansatz(1, 0, rotations=("Ry",), hadamard=False)
    Y = np.array([[0, -1j], [1j, 0]])
    tr = run_varqrte(a1, np.array([0.3]), Y, 0.5, 1e-2, lam=0.0)
    one = max(abs(tr.theta[-1][0] - 1.3), 1 - tr.fidelity[-1])
    ok &= one <= 1e-6
    parts.append(f"single-qubit error {one:.1e}")
    # forward Euler is first order
    a2 = Ansatz(3, 2)
    th2 = np.random.default_rng(2).uniform(-1, 1, a2.n_params)
    ref = reference_theta(a2, th2, H, 0.05)
    e = [np.linalg.norm(run_varqrte(a2, th2, H, 0.05, d).theta[-1] - ref) for d in (1e-3, 5e-4)]
    ratio = e[0] / e[1]
    ok &= 1.8 <= ratio <= 2.2
    parts.append(f"Euler ratio {ratio:.3f}")
    # pilot threshold shipped with the package
    rec = pilot_threshold()
    cfg = rec["config"]
    ansatz, Hp, th0 = pilot_problem(cfg, rec["theta0"])
    final = float(run_varqrte(ansatz, th0, Hp, cfg["T"], cfg["dtau"], lam=cfg["lam"], record_every=100).fidelity[-1])
    ok &= final >= rec["threshold"]
    parts.append(f"pilot fidelity {final:.4f} >= {rec['threshold']}")
    assert report(12, ok, ", ".join(parts))


def test_c13_identities(report, tmp_path, capsys):
    out = tmp_path / "identities.json"
    rc = main(["verify", "identities", "--json", str(out)])
    capsys.readouterr()
    rows = json.loads(out.read_text())
    bad = [f"{r['name']} ({r['err']:.1e} > {r['tol']:.0e})" for r in rows if not r["pass"]]
    text = f"{len(rows) - len(bad)}/{len(rows)} identity checks pass"
    if bad:
        text += "; failing: " + ", ".join(bad)
    assert report(13, rc == 0 and not bad, text)
