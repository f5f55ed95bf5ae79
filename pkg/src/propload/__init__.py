"""Classical simulation of loading probability distributions into quantum amplitudes.

Ladder-state circuits, discretized Schrodinger Hamiltonians, Trotter,
fast-forward, analytic-propagator and variational time evolution, ground-state
projection, and the special functions these rely on.
"""

import os

# PROPLOAD_THREADS caps BLAS/OpenMP threads; it only takes effect before numpy loads
_threads = os.environ.get("PROPLOAD_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"
