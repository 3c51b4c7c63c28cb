"""Leverage-score sampling for least-squares and ridge regression."""
from .errors import (
    ConstructionError,
    DegenerateInputError,
    InputError,
    LvsError,
    MatrixFormatError,
    ParameterError,
    PreconditionError,
)
from .linalg import (
    ScoreVector,
    SvdFactors,
    col_leverage_scores,
    extended_matrix,
    extended_svd,
    polar_factor,
    ridge_row_scores,
    row_leverage_scores,
    score_tail_check,
    statistical_dimension,
    svd,
)
from .metrics import tv_distance
from .sampling import (
    SamplingMatrix,
    apply_sampler,
    approx_leverage_scores_sketched,
    draw_column_sampler,
    draw_row_sampler,
)
from .solvers import (
    SolveReport,
    algorithm1_ls,
    algorithm3_ridge,
    algorithm4_classical,
    objective_ridge,
    ridge_estimator,
    solve_ls_cgnr,
    solve_ls_direct,
)

__version__ = "0.1.0"
