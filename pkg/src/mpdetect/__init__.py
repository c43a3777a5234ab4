"""Signal detection under bounded interference with Neyman-Pearson and RDT
tests, Monte Carlo verification, and a finite check of the Multiplicity
Principle on their landscapes."""

from .detectors import (
    SelectivityDescriptor,
    TestKind,
    TestSpec,
    check_invariance_and_integration,
    decide,
    np_decide,
    np_power_exact,
    rdt_decide,
    rdt_power_lower_bound,
    selectivity_of,
)
from .gaussian import phi, phi_inv, q_half, rdt_threshold, threshold_residual
from .montecarlo import MCEstimate, estimate_pdet, estimate_pfa, sweep, wilson_ci
from .observation import Interference, ObservationSpec, generate, parse_interference
from .preorder import (
    FinitePreorder,
    MPVerdict,
    build_landscape_abstraction,
    check_mp,
    maximal_elements,
    sup_set,
    upper_bounds,
)

__version__ = "0.1.0"
