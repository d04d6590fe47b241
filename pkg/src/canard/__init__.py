"""Regularization functions that create limit cycles at a visible-invisible two-fold.

The package computes the slow divergence integral of a regularized planar
piecewise smooth system at high precision, builds regularization functions
whose integral has prescribed simple roots, and simulates the regularized
flow at moderate ``epsilon``.

Modules
-------
precision, series, bell, quadrature, polynomial
    Arbitrary precision numerics.
pws
    Piecewise smooth systems, sliding quantities and assumption audits.
regularization
    Regularization functions, polynomial jets and bump blending.
sdi
    Slow divergence integral by series and by quadrature.
synthesis
    Construction of regularization functions with ``k - 1`` roots.
ode, flow
    Trajectories, transition maps and limit cycles.
cli
    Command line front end.
"""

from .errors import (
    AuditFailure,
    CanardError,
    ConfigError,
    NoReturnError,
    StiffSegmentError,
    SynthesisError,
)
from .precision import DEFAULT_PRECISION, big, to_decimal, working_precision
from .pws import PWSSystem, audit_assumptions, classify_sigma_point, filippov_field, load_system, reference_system
from .regularization import ArctanRegularization, BlendedRegularization, PolynomialJet, blend, monotonicity_audit
from .sdi import find_simple_roots, sdi_expansion, sdi_quadrature, sdi_series
from .synthesis import SynthesisSpec, construct_psi, synthesize, tune_delta

__version__ = "0.1.0"

__all__ = [
    "AuditFailure",
    "CanardError",
    "ConfigError",
    "NoReturnError",
    "StiffSegmentError",
    "SynthesisError",
    "DEFAULT_PRECISION",
    "big",
    "to_decimal",
    "working_precision",
    "PWSSystem",
    "audit_assumptions",
    "classify_sigma_point",
    "filippov_field",
    "load_system",
    "reference_system",
    "ArctanRegularization",
    "BlendedRegularization",
    "PolynomialJet",
    "blend",
    "monotonicity_audit",
    "find_simple_roots",
    "sdi_expansion",
    "sdi_quadrature",
    "sdi_series",
    "SynthesisSpec",
    "construct_psi",
    "synthesize",
    "tune_delta",
]
