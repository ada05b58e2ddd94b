"""Ψ-Hilfer fractional calculus and coupled hybrid fractional equation solvers.

>>> import numpy as np
>>> from psi_hilfer import PsiFunction, FracIntegralOperator, make_graded_mesh
>>> mesh = make_graded_mesh(1.0, 64)
>>> op = FracIntegralOperator(PsiFunction.identity(), 0.5, mesh)
>>> P, phi = op.apply(0.0, np.ones(65))       # I^{1/2} 1 = tau^{1/2} / Gamma(3/2)
>>> round(float(phi[-1]), 12) == round(1 / 0.886226925452758, 12)
True
"""

from .errors import (
    ConfigError,
    DegenerateMultiplier,
    EvaluationError,
    InsufficientResolution,
    InvalidArgument,
    PsiHilferError,
    SingularBoundaryOperator,
    Singularity,
)
from .existence import (
    BvpHypothesisData,
    ExistenceReport,
    IvpHypothesisData,
    check_bvp_condition,
    check_ivp_condition,
    compute_radius,
    estimate_bound_g,
    estimate_lipschitz,
)
from .expr import Expr, parse
from .frac_calculus import (
    FracIntegralOperator,
    HilferDerivativeOperator,
    IdentityReport,
    convergence_study,
    frac_integral,
    frac_integral_power,
    hilfer_derivative,
    identity_suite,
    verify_inversion,
    verify_semigroup,
)
from .hybrid_bvp import (
    HybridBvpProblem,
    OmegaPair,
    boundary_defect,
    compute_omega,
    picard_step_bvp,
    residual_bvp,
    solve_coupled_bvp,
)
from .hybrid_ivp import HybridIvpProblem, picard_step_ivp, residual_ivp, solve_coupled_ivp
from .psi_core import (
    FracOrder,
    GradedMesh,
    PsiFunction,
    WeightedGridFunction,
    make_graded_mesh,
    reweight,
    weighted_norm,
)
from .solver import SolutionPair, SolverConfig

__version__ = "0.1.0"
