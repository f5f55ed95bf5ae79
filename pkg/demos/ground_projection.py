"""Project a ladder onto the oscillator ground state with phase estimation.

The two- and four-level ladders are propagated by the fast-forwarded
oscillator ``H = p^2 + x^2``.  For a growing ancilla register the demo prints
the ground-bin probability, the observed frequency over 1000 shots and the
fidelity of the post-selected state with the exact ground state.
"""

import math

import numpy as np

from propload.evolve import fastforward_qho, project_ground
from propload.gridpdf import Grid
from propload.hamiltonian import PotentialSpec, build_hamiltonian
from propload.ladder import explicit_four_level, explicit_two_level


def main():
    N = 8
    g = Grid(N, 4.0)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), g, "spectral")
    w, U = np.linalg.eigh(H.dense())
    print(f"E0 = {w[0]:.6f}, gap = {w[1] - w[0]:.6f}")
    for name, build in (("two-level", explicit_two_level), ("four-level", explicit_four_level)):
        init = build(N).run()
        print(f"{name}: overlap with ground state {abs(np.vdot(U[:, 0], init.amps)) ** 2:.4f}")
        for m in (2, 3, 4, 6):
            res = project_ground(init, lambda v, t: fastforward_qho(v, t, g), 2 * math.pi / 2**m, m,
                                 shots=1000, seed=0, ground_energy=float(w[0]))
            fid = abs(np.vdot(U[:, 0], res.state.amps)) ** 2
            print(f"  m={m}: p_ground {res.p_ground:.4f}, observed {res.success_rate:.3f}, fidelity {fid:.5f}")


if __name__ == "__main__":
    main()
