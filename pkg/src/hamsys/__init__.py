"""Exact tools for constrained Hamiltonian systems.

Symbolic side: Legendre transform with a singular Hessian, constraint
chains and Dirac brackets, generalized Hamilton-Jacobi families,
conversion of second-class pairs to first-class constraints on an
enlarged phase space, and BRST charges with their gauge-fixed
Hamiltonians. Numerical side: compilation of the exact equations of
motion to floating point and a fixed-step integrator with constraint
residual tracking. All symbolic computation is over the rationals.
"""

__version__ = "0.1.0"

from hamsys.algebra import (
    GradedExpr,
    Parity,
    VariableRegistry,
    VarKind,
    extended_bracket,
    grad_derivative,
    is_weakly_zero,
    normalize,
    poisson_bracket,
    reduce_weak,
    substitute,
)
from hamsys.brst import brst_transform, build_complex, check_brst_identities
from hamsys.dirac import ConstraintChain, InconsistentSystemError, dirac_bracket, run_chain
from hamsys.dynamics import FamilyConstants, compile_rhs, integrate_rk4
from hamsys.embedding import bft_embed, check_gauss_algebra
from hamsys.hamilton_jacobi import build_hj_system, integrability_closure
from hamsys.legendre import LegendreResult, analyze
from hamsys.modelio import ModelSpec, ParseError, model_hash, parse_model, render_model
from hamsys.models import bundled_names, load

__all__ = [
    "GradedExpr",
    "Parity",
    "VariableRegistry",
    "VarKind",
    "extended_bracket",
    "grad_derivative",
    "is_weakly_zero",
    "normalize",
    "poisson_bracket",
    "reduce_weak",
    "substitute",
    "brst_transform",
    "build_complex",
    "check_brst_identities",
    "ConstraintChain",
    "InconsistentSystemError",
    "dirac_bracket",
    "run_chain",
    "FamilyConstants",
    "compile_rhs",
    "integrate_rk4",
    "bft_embed",
    "check_gauss_algebra",
    "build_hj_system",
    "integrability_closure",
    "LegendreResult",
    "analyze",
    "ModelSpec",
    "ParseError",
    "model_hash",
    "parse_model",
    "render_model",
    "bundled_names",
    "load",
    "__version__",
]
