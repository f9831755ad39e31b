"""Leverage-aware dynamic beta estimation toolkit.

The package tracks per-stock betas with a level-based renormalization
that absorbs leverage-driven volatility moves, benchmarks the estimator
against weighted least squares, quantile regressions and (A)DCC
conditional betas on seven synthetic market models, and applies both
beta sources to beta-neutral factor backtests with bias diagnostics.
"""

from .params import DEFAULT_PARAMS, TRADING_DAYS, ReactiveParams
from .timeseries import (
    EmaState,
    Series,
    arithmetic_returns,
    ema_update,
    exp_weighted_moments,
    rolling_correlation,
)
from .volatility import (
    LevelState,
    VolState,
    filter_phi,
    init_levels,
    normalized_returns,
    update_levels,
    update_reactive_vols,
)
from .beta import (
    BetaState,
    ReactiveBetaEngine,
    beta_elasticity,
    elasticity_correction,
    leverage_correction,
    reactive_beta_from_returns,
    update_beta,
)
from .estimators import (
    DccParams,
    DccState,
    GarchParams,
    WeightedRegressionProblem,
    dcc_beta,
    dcc_calibrate,
    dcc_step,
    mad_beta,
    ols_beta,
    quantile_beta,
    trimean_beta,
)
from .montecarlo import McBatch, McConfig, McPath, generate, generate_batch, ou_step, student_t_scaled
from .evaluation import (
    ErrorSample,
    ErrorSamples,
    HedgeReport,
    SelectionBiasInputs,
    calibrate_ell_diff,
    elasticity_diagnostic,
    selection_bias,
    strategy_bias_corstd,
    table2_stats,
)
from .strategies import (
    FactorWeights,
    Universe,
    backtest,
    build_factor,
    compute_panels,
    indicator,
    synthetic_universe,
)
from .benchmark import run_benchmark

__version__ = "0.1.0"
