"""Load a standard normal by evolving a coarse ladder under an oscillator.

The two-level plateau and the four-level ladder are evolved with the exact
oscillator propagator (omega = 1/2, m = 1, whose ground density is N(0, 1)).
The sup distance to the normal density is printed over time.  The same run
on a periodic grid is shown for contrast: the ladder's jumps shed
high-momentum tails that leave the window in the continuum but wrap around
on the grid, so the circuit result is further from the normal.
"""

import numpy as np

from propload.analytic import InitialState, Kernel, closed_form
from propload.evolve import evolve_trotter
from propload.gridpdf import Grid, TargetPdf, pdf_eval
from propload.hamiltonian import PotentialSpec, build_hamiltonian


def sup_error(kind, t, grid, normal):
    psi = closed_form(Kernel("harmonic", {"omega": 0.5}), InitialState(kind), t, grid.x)
    return float(np.max(np.abs(np.abs(psi) ** 2 - normal)))


def main():
    grid = Grid(9, 6.0)
    normal = np.asarray(pdf_eval(TargetPdf("normal"), grid.x))

    print("t      plateau  four-level")
    for t in (0.2, 0.4, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0):
        print(f"{t:<6} {sup_error('plateau', t, grid, normal):.4f}   {sup_error('fourlevel', t, grid, normal):.4f}")

    # the same run as a circuit: sample the four-level state and Trotterize
    psi0 = InitialState("fourlevel")
    v = np.asarray(psi0(grid.x), dtype=complex)
    v /= np.linalg.norm(v)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 0.5}), grid, "spectral")
    out = evolve_trotter(v, H, 1.25, 1e-4)
    dens = np.abs(out) ** 2 / grid.delta
    print(f"Trotter four-level at t=1.25: sup error {np.max(np.abs(dens - normal)):.4f}")
    psi = closed_form(Kernel("harmonic", {"omega": 0.5}), psi0, 1.25, grid.x)
    print(f"continuum mass left inside the window: {np.sum(np.abs(psi) ** 2) * grid.delta:.4f}")


if __name__ == "__main__":
    main()
