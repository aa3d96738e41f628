"""Admissibility certificates for diagonal retarded delay systems."""

from .admissibility import (
    ComponentCertificate,
    SystemReport,
    Verdict,
    component_bound,
    direct_component_coeff,
    direct_preset,
    heat_preset,
    system_check,
)
from .charfun import CharacteristicFn, count_unstable_roots
from .costint import j_closed, j_quadrature, j_residue, j_zero
from .ddesim import Indicator, DampedSinusoids, SampledGrid, simulate_component, simulate_system, verify_bound
from .errors import DelayAdmError, HypothesisViolation, NumericalFailure, ValidationError
from .model import DEFAULT_TOL, ComponentParams, DiagonalDelaySystem, ToleranceProfile
from .region import RegionParams, boundary, contains, eta_pi

__version__ = "0.1.0"
