"""Ladder states: the monotone construction, arbitrary levels and a fitted normal.

Prints gate counts and amplitudes for a small monotone ladder, rebuilds the
four-level example from its levels, and shows how the number of levels
needed for a discretized normal grows as the tolerance shrinks.
"""

import math

import numpy as np

from propload.gridpdf import Grid, TargetPdf, amplitude_encode
from propload.ladder import (
    LadderSpec, angle_levels, arbitrary_ladder_circuit, explicit_four_level, ladder_for_pdf, ladder_state,
    monotone_ladder_circuit, validate_angles,
)


def main():
    # each angle needs tan > 1 and must dominate the ones after it
    angles = (math.atan(math.exp(0.8)), math.atan(math.exp(0.3)))
    print("angle problems:", validate_angles(angles) or "none")
    spec = LadderSpec(2, 5, angles=angles)
    c = monotone_ladder_circuit(spec)
    print(f"monotone ladder N=5 k=2: {len(c)} gates, levels {np.round(angle_levels(angles), 4)}")
    amps = c.run().amps.real
    print("first block amplitudes:", np.round(amps[::8], 4))

    four = arbitrary_ladder_circuit(LadderSpec(1, 6, levels=(1.0, math.sqrt(7))))
    print(f"levels (1, sqrt 7) over the whole grid: {len(four)} gates, block amplitudes "
          f"{np.round(four.run().amps.real[::16] * 4, 4)}")
    ref = explicit_four_level(6).run().amps.real
    print(f"explicit four-level circuit (middle half only): {np.round(ref[::8] * 8, 4)}")

    g = Grid(10, 5.0)
    target = TargetPdf("normal")
    exact = amplitude_encode(target, g, "density").state.amps
    for eps in (0.4, 0.2, 0.1, 0.05, 0.02):
        s = ladder_for_pdf(target, g, eps)
        d = np.linalg.norm(ladder_state(s).amps - exact)
        print(f"eps {eps:<5} smallest k {s.info['k_min']}, used k {s.k}, distance {d:.2e}")


if __name__ == "__main__":
    main()
