"""Resonance-based low-regularity time integrators for periodic dispersive PDEs.

Subpackages:

* ``spectral`` -- Fourier fields, linear flows, norms, rough data, cutoff.
* ``kdv`` / ``nls`` -- one-step maps (splitting, exponential, resonance-based).
* ``trees`` -- decorated-tree engine: enumeration, symmetry factors,
  oscillatory integrals, discretisations, tree series, admissible-cut coproduct.
* ``bourgain`` -- discrete Bourgain-space diagnostics.
* ``harness`` -- experiment orchestration (references, convergence fits, CLI).
"""

__version__ = "0.1.0"

from . import bourgain, harness, kdv, nls, spectral, trees  # noqa: E402,F401
from .errors import (  # noqa: E402,F401
    DegenerateFit,
    NoConvergence,
    NonFiniteValue,
    NonZeroMeanMode,
    UnsupportedOrder,
)
