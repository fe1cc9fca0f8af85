"""Fourier-space analysis of the thermoelastic plate with Newton cooling.

Characteristic roots of the reduced cubic, the exact solution multiplier and
its asymptotic profiles, L2 norms by radial quadrature, and numerical checks
of the large-time rates.
"""

from .errors import (
    BadFit,
    BranchJump,
    DegenerateFrequency,
    DegenerateRoots,
    DomainError,
    OutsideZone,
    StepFailure,
    ThermoplateError,
    ToleranceNotMet,
    UnboundedRatio,
)
from .multipliers import DataSymbol, GaussianDatum, MomentSet, phi_hat, psi_hat, u_hat
from .quadrature import NormResult, QuadratureSpec, l2_norm_radial
from .roots import CharacteristicRoots, ModelParams, characteristic_roots, track_branches
from .verifier import BoundCheck, ExperimentConfig, RateFit, check_bound, check_theorem1, check_theorem2, table1_experiment

__version__ = "0.1.0"
