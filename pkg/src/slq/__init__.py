"""Sturm-Liouville operators with distributional coefficients via quasi-derivatives.

Set ``SLQ_DISABLE_NUMBA=1`` before import to run the numpy fallback kernels.
"""
from .bracket import BracketValue, bracket_at, bracket_tail_limit, lagrange_residual
from .coeffs import (
    CoefficientSet,
    GrowthTag,
    PiecewiseFn,
    Problem,
    StepFn,
    dump_problem,
    load_problem,
    parse_problem,
    save_problem,
    validate_local_integrability,
)
from .expr import Expr, parse_expression
from .integrator import QuasiState, QuasiTrajectory, Tolerances, fundamental_pair, solve_system
from .kernels import BACKEND
from .quadform import (
    CutoffFamily,
    TestFunction,
    cutoff_multiply,
    form_value,
    rayleigh_lower_bound_probe,
)
from .report import ConditionReport, Verdict
from .sacheck import (
    IntervalSequence,
    RhoMap,
    check_clark,
    check_hartman_rellich,
    check_theorem_b,
    check_theorem_c,
    kernel_probe,
    rho_transform,
)
from .shinzettl import ShinZettlMatrix, apply_l_smooth, matrix_at
from .spectral import EigenResult, dirichlet_shoot, eigenvalues_on_interval

__version__ = "0.1.0"
