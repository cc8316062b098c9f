"""Non-local lattice derivative operators, quantum-circuit block-encodings of
them, a Shannon-wavelet multiscale transform, and a diagonally preconditioned
solver emulation, with a statevector simulator sized for laptop-scale registers.

Layout:

- :mod:`slacq.operators` -- circulant derivative operators and their symbols
- :mod:`slacq.sim`       -- named-register statevector simulator and gate tallies
- :mod:`slacq.prep`      -- inequality-test state preparation for the coefficient
  ladders
- :mod:`slacq.encoding`  -- LCU block-encodings, linear combinations, masked
  variants
- :mod:`slacq.wavelet`   -- quantum Shannon wavelet transform and multiscale plans
- :mod:`slacq.precond`   -- dyadic diagonal preconditioner, nullspace projection,
  benchmark operators, emulated solves
- :mod:`slacq.cli`       -- experiment commands (``slacq <command> ...``)
"""

from slacq.operators import (
    LatticeConfig,
    CirculantOperator,
    infinite_kernel,
    exact_laplacian,
    truncated_laplacian,
    exact_first_order,
    truncated_first_order,
    to_dense,
    circulant_spectrum,
)

__all__ = [
    "LatticeConfig",
    "CirculantOperator",
    "infinite_kernel",
    "exact_laplacian",
    "truncated_laplacian",
    "exact_first_order",
    "truncated_first_order",
    "to_dense",
    "circulant_spectrum",
]

__version__ = "0.1.0"
