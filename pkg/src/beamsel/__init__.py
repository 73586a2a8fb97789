"""Conflict-free beam selection and hybrid precoding simulator for
wideband multiuser mmWave massive MIMO downlinks.

The package builds geometric frequency-selective channels, selects one
analog beamforming codeword per user without beam conflicts via an exact
assignment solver, applies ZF/MMSE digital precoding per subcarrier, and
evaluates achievable sum-rates in reproducible Monte Carlo sweeps.
"""

__version__ = "0.1.0"

from .params import SystemParams
from .codebook import Codebook, dft_codebook, steering_vector
from .channel import (
    FreqChannel,
    PathSet,
    TapChannel,
    draw_paths,
    pulse_shape,
    tap_channel,
    to_frequency,
)
from .rate import RateReport, if_rate, per_user_rate, sum_rate
from .hungarian import hungarian_solve
from .selection import (
    AnalogPrecoder,
    Assignment,
    CostMatrix,
    build_cost_matrix,
    if_rate_table,
    preprocess,
    select_codewords,
    threshold_gamma,
)
from .precoding import (
    EquivalentChannel,
    HybridPrecoder,
    design_hybrid,
    equivalent_channel,
    mmse_digital,
    normalize_columns,
    zf_digital,
)
from .baselines import SchemeId, fully_digital, greedy_select
from .experiment import ResultRow, ResultTable, SweepConfig, run_sweep, run_trial

__all__ = [
    "SystemParams",
    "Codebook",
    "dft_codebook",
    "steering_vector",
    "PathSet",
    "TapChannel",
    "FreqChannel",
    "pulse_shape",
    "draw_paths",
    "tap_channel",
    "to_frequency",
    "RateReport",
    "if_rate",
    "per_user_rate",
    "sum_rate",
    "hungarian_solve",
    "CostMatrix",
    "Assignment",
    "AnalogPrecoder",
    "if_rate_table",
    "threshold_gamma",
    "build_cost_matrix",
    "preprocess",
    "select_codewords",
    "EquivalentChannel",
    "HybridPrecoder",
    "equivalent_channel",
    "zf_digital",
    "mmse_digital",
    "normalize_columns",
    "design_hybrid",
    "SchemeId",
    "greedy_select",
    "fully_digital",
    "SweepConfig",
    "ResultRow",
    "ResultTable",
    "run_trial",
    "run_sweep",
]
