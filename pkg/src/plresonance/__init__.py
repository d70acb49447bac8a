"""Variational solvers for p-Laplacian boundary-value problems at resonance.

The package computes first eigenpairs of the p-Laplacian by Rayleigh
quotient minimization, checks generalized Landesman-Lazer hypothesis
sets on user-supplied nonlinearities, certifies mountain-pass geometry,
and locates nontrivial weak solutions with a path-deformation mountain
pass algorithm instrumented with Cerami-sequence diagnostics.
"""

from .eigen import ConvergenceError, EigenPair, compute_first_eigenpair, rayleigh_quotient
from .expr import DomainError, Expression, ExprError, evaluate, parse, to_text
from .functional import (
    CeramiRecord,
    NumericAntiderivative,
    ProblemSpec,
    SpecError,
    cerami_measure,
    dual_norm,
    energy,
    weak_gradient,
)
from .hypotheses import (
    ClauseReport,
    HypothesisReport,
    SamplePlan,
    check_all,
    check_growth,
    check_h_regularity,
    check_landesman_lazer,
    check_subcritical_vanishing,
    check_theta_limsup,
)
from .mesh import (
    BCKind,
    Field,
    Mesh,
    RieszMap,
    boundary_integral,
    build_interval_mesh,
    build_rectangle_mesh,
    grad_seminorm_p,
    lp_norm_p,
    mean_value,
    sobolev_norm_1p,
    write_field_csv,
)
from .mpsolve import (
    DegeneratePathError,
    GeometryCertificate,
    GeometryCertificateError,
    LowPointNotFound,
    MountainPassResult,
    VerificationRecord,
    certify_ring,
    find_low_point,
    mountain_pass,
    verify_solution,
)

__version__ = "0.1.0"
