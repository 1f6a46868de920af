"""Computational toolkit for the Hahn double sequence space and its
companion spaces: double sequences, θ-limits, norms, duals, 4D matrix
transformations and matrix-class characterizations, with an exact oracle."""

from .sequence import (FLOAT, RATIONAL, CumulativeView, DoubleSequence, EvaluationError,
                       ExprSequence, FiniteSequence, LazySequence, ModeError, Window, WindowError,
                       absolute, corner_averages, delta01, delta10, delta11, differentiate, e,
                       e_block, e_col, e_row, e_unit, hahn_coefficients, integrate, partial_sum,
                       partial_sums, residual, scale, section, special, zero)
from .convergence import (Fails, Holds, Inconclusive, LimitSpec, Outcome, Verdict, bp_limit,
                          bounded_partial_sums, conjunction, pringsheim_limit, r_limit,
                          series_theta_sum, sup_norm, theta_limit)
from .spaces import (NormReport, SpaceId, alpha_dual_member, beta_bp_dual_member, bs_norm,
                     bv_variation, functional_norm, gamma_dual_member, hahn_norm,
                     hahn_seminorm_p, lq_norm, member, pinf_norm)
from .matrix4d import (ExprMatrix, FiniteMatrix, Matrix4D, RowSequence, abel_double_summation,
                       apply, make_B, make_D, make_E, make_F, make_T)
from .characterize import (ClassId, ClassReport, check_condition_3_3, check_condition_3_4,
                           check_condition_3_5, classify, hahn_matrix_norm, matrix_norm_report)

__version__ = "0.1.0"
