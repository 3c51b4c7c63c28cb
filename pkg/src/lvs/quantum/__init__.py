"""Matrix-level simulation of block-encodings, singular value transforms,
leverage-state preparation and amplitude estimation."""
from .algorithms import (
    algorithm2_quantum_ls,
    algorithm4_quantum_ridge,
    prepare_ls_sampler,
    prepare_ridge_sampler,
)
from .amplitude import ae_simulate, estimate_leverage_score, estimate_rank, estimate_relative
from .encoding import (
    BlockEncoding,
    apply_svt,
    dilate_block_encoding,
    extend_block_encoding,
)
from .polynomial import QsvtPolynomial, build_sign_polynomial
from .states import (
    CostLedger,
    PureState,
    precision_budget,
    prepare_col_leverage_state,
    prepare_ridge_leverage_state,
    prepare_row_leverage_state,
    sample_leverage,
)
