"""Leverage-aware beta estimation on top of the level/volatility machinery.

The estimator regresses renormalized returns on each other with an
exponential look-back, removes two sources of bias from the regression
increments (the correlation shift driven by index-level leverage, and
the sensitivity of beta to relative-volatility swings), and finally
denormalizes the slope with the current level ratio and both correction
factors.

Everything is elementwise over stocks so a single engine serves both a
price panel (one index, many stocks) and a batch of simulated paths
(one index per path).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .params import ReactiveParams
from .volatility import (
    LevelState,
    VolState,
    fast_gap,
    init_levels,
    init_vols,
    normalized_returns,
    update_levels,
    update_reactive_vols,
)

__all__ = [
    "BetaState",
    "ReactiveBetaEngine",
    "StepResult",
    "beta_elasticity",
    "leverage_correction",
    "elasticity_correction",
    "init_beta_state",
    "update_beta",
    "reactive_beta_from_returns",
]

# Correction factors divide the regression increments, so they are kept
# away from zero; values this small never occur on sane price data.
_CORRECTION_FLOOR = 0.05


def beta_elasticity(tilde_beta, params: ReactiveParams):
    """Sensitivity of the normalized beta to its log squared relative
    volatility: zero below ``elasticity_lo``, then rising linearly until
    it saturates at ``elasticity_cap``. Continuous everywhere."""
    b = np.asarray(tilde_beta, dtype=float)
    lo, slope = params.elasticity_lo, params.elasticity_slope
    return np.clip(slope * (b - lo), 0.0, params.elasticity_cap)


def leverage_correction(level: LevelState, params: ReactiveParams):
    """Correction for the correlation shift induced by index moves.

    Evaluated on yesterday's state: ``1 + (ell - ell_prime) * gap`` with
    ``gap`` the relative distance of the fast index EMA from the price.
    Above one when the index sits below its fast EMA (falling market).
    """
    corr = 1.0 + params.ell_diff * fast_gap(level)
    return np.maximum(corr, _CORRECTION_FLOOR)


def elasticity_correction(state: "BetaState", vol: VolState, params: ReactiveParams):
    """Correction for beta drift caused by relative-volatility swings.

    ``1 + (2 f(b) / b) * delta`` where ``b`` is the previous normalized
    beta and ``delta`` the relative deviation of the current volatility
    ratio from the square root of its tracked squared average. Equals one
    whenever the elasticity is zero (low-beta regime) or the state is not
    yet warmed up.
    """
    b = np.asarray(state.tilde_beta, dtype=float)
    f = beta_elasticity(b, params)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.sqrt(np.asarray(vol.tilde_var_stock, dtype=float)
                      / np.asarray(vol.tilde_var_index, dtype=float))
        root_kappa = np.sqrt(np.asarray(state.kappa, dtype=float))
        delta = rel / root_kappa - 1.0
        corr = 1.0 + (2.0 * f / b) * delta
    corr = np.where(np.isfinite(corr) & (f > 0.0), corr, 1.0)
    corr = np.where(state.kappa_seeded, corr, 1.0)
    return np.maximum(corr, _CORRECTION_FLOOR)


@dataclass(frozen=True)
class BetaState:
    """Regression EMAs and the betas derived from them.

    ``cross`` and the two ``var_*`` fields are plain second moments of
    the renormalized returns; ``cross_corrected`` carries the same cross
    product divided by both correction factors. All four start at zero so
    their ratio is an exactly exponentially weighted regression. ``kappa``
    tracks the squared relative volatility and is seeded with its first
    observation.
    """

    cross: np.ndarray | float
    cross_corrected: np.ndarray | float
    var_index: np.ndarray | float
    var_stock: np.ndarray | float
    kappa: np.ndarray | float
    kappa_seeded: np.ndarray | bool
    tilde_beta: np.ndarray | float
    beta: np.ndarray | float
    corr_leverage: np.ndarray | float = 1.0
    corr_elasticity: np.ndarray | float = 1.0


def init_beta_state(index_shape=(), stock_shape=()) -> BetaState:
    zi = np.zeros(index_shape) if index_shape else 0.0
    zs = np.zeros(stock_shape) if stock_shape else 0.0
    nan_s = np.full(stock_shape, np.nan) if stock_shape else np.nan
    seeded = np.zeros(stock_shape, dtype=bool) if stock_shape else False
    return BetaState(
        cross=zs + 0.0, cross_corrected=zs + 0.0,
        var_index=zi + 0.0, var_stock=zs + 0.0,
        kappa=zs + 0.0, kappa_seeded=seeded,
        tilde_beta=nan_s, beta=nan_s,
    )


def update_beta(
    state: BetaState,
    r_index,
    r_stock,
    prev_tilde_var_index,
    corr_leverage,
    corr_elasticity,
    level: LevelState,
    vol: VolState,
    index_price,
    stock_prices,
    params: ReactiveParams,
    stock_mask: Optional[np.ndarray] = None,
) -> BetaState:
    """One daily advance of the regression EMAs and the derived betas.

    ``r_index``/``r_stock`` are today's normalized returns, divided by
    yesterday's normalized index volatility (``prev_tilde_var_index``)
    when ``params.hat_normalize`` is set. The corrected cross moment is
    incremented by the cross product divided by both correction factors;
    the normalized beta is the ratio of that moment to the index moment,
    and the reactive beta multiplies back the level ratio and both
    corrections. An index moment of zero leaves the betas undefined (NaN).
    """
    lam = params.lambda_beta
    r_i = np.asarray(r_index, dtype=float)
    r_s = np.asarray(r_stock, dtype=float)
    if stock_mask is None:
        stock_mask = np.isfinite(r_s)

    prev_var = np.asarray(prev_tilde_var_index, dtype=float)
    if params.hat_normalize:
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = 1.0 / np.sqrt(prev_var)
        index_ok = np.isfinite(scale)
    else:
        scale = np.ones_like(prev_var) if prev_var.shape else 1.0
        index_ok = np.isfinite(r_i)
    with np.errstate(invalid="ignore"):
        hr_i = r_i * scale
        hr_s = np.where(stock_mask, r_s, 0.0) * scale

    adv_index = index_ok
    adv_stock = stock_mask & index_ok

    var_index = np.where(adv_index,
                         (1.0 - lam) * state.var_index + lam * hr_i * hr_i,
                         state.var_index)
    incr_cross = np.where(adv_stock, hr_s * hr_i, 0.0)
    cross = np.where(adv_stock, (1.0 - lam) * state.cross + lam * incr_cross,
                     state.cross)
    denom = np.asarray(corr_leverage, dtype=float) * np.asarray(corr_elasticity, dtype=float)
    cross_corrected = np.where(
        adv_stock,
        (1.0 - lam) * state.cross_corrected + lam * incr_cross / denom,
        state.cross_corrected)
    var_stock = np.where(adv_stock,
                         (1.0 - lam) * state.var_stock + lam * hr_s * hr_s,
                         state.var_stock)

    # squared relative volatility tracker, using today's normalized vols
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio_sq = np.asarray(vol.tilde_var_stock, dtype=float) \
                   / np.asarray(vol.tilde_var_index, dtype=float)
    ratio_ok = stock_mask & np.isfinite(ratio_sq) & (ratio_sq > 0.0)
    kappa = np.where(ratio_ok,
                     np.where(state.kappa_seeded,
                              (1.0 - lam) * state.kappa + lam * ratio_sq,
                              ratio_sq),
                     state.kappa)
    kappa_seeded = state.kappa_seeded | ratio_ok

    with np.errstate(invalid="ignore", divide="ignore"):
        tilde_beta = cross_corrected / var_index
    tilde_beta = np.where(np.asarray(var_index) > 0.0, tilde_beta, np.nan)
    i = np.asarray(index_price, dtype=float)
    s = np.asarray(stock_prices, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        level_ratio = (level.stock_level * i) / (s * level.index_level)
        beta = tilde_beta * level_ratio * denom

    tilde_beta = np.where(stock_mask, tilde_beta, state.tilde_beta)
    beta = np.where(stock_mask, beta, state.beta)
    return BetaState(
        cross=cross, cross_corrected=cross_corrected,
        var_index=var_index, var_stock=var_stock,
        kappa=kappa, kappa_seeded=kappa_seeded,
        tilde_beta=tilde_beta, beta=beta,
        corr_leverage=np.asarray(corr_leverage, dtype=float) + 0.0,
        corr_elasticity=np.asarray(corr_elasticity, dtype=float) + 0.0,
    )


@dataclass(frozen=True)
class StepResult:
    """Per-day outputs of the engine.

    ``beta_plain`` is the regression ratio without the increment
    corrections and ``relvol_hat`` the ratio of the renormalized vols,
    the two panels the elasticity diagnostic consumes.
    """

    beta: np.ndarray | float
    tilde_beta: np.ndarray | float
    sigma_index: np.ndarray | float
    sigma_stock: np.ndarray | float
    corr_leverage: np.ndarray | float
    corr_elasticity: np.ndarray | float
    r_index: np.ndarray | float
    r_stock: np.ndarray | float
    beta_plain: np.ndarray | float = np.nan
    relvol_hat: np.ndarray | float = np.nan


class ReactiveBetaEngine:
    """Streaming daily estimator over one index and any number of stocks.

    Feed one day of prices at a time; every state object is a plain value
    so the engine can be snapshotted or handed between threads between
    steps. Stocks with a NaN price keep their previous state for the day.
    """

    def __init__(self, params: Optional[ReactiveParams] = None):
        self.params = params if params is not None else ReactiveParams()
        self.levels: Optional[LevelState] = None
        self.vols: Optional[VolState] = None
        self.beta_state: Optional[BetaState] = None
        self.day: int = 0
        self.frozen_days: int = 0

    def start(self, index_price, stock_prices) -> None:
        """Seed all states with the first day of prices."""
        stock_prices = np.asarray(stock_prices, dtype=float)
        index_price = np.asarray(index_price, dtype=float)
        self.levels = init_levels(index_price, stock_prices)
        index_shape = np.shape(index_price)
        stock_shape = np.shape(stock_prices)
        self.vols = init_vols(index_shape, stock_shape)
        self.beta_state = init_beta_state(index_shape, stock_shape)
        self.day = 1

    def step(self, index_price, stock_prices) -> StepResult:
        """Consume one day of prices and return the updated estimates."""
        if self.levels is None:
            raise RuntimeError("engine not started; call start() first")
        params = self.params
        s = np.asarray(stock_prices, dtype=float)
        mask = np.isfinite(s)
        if not np.all(mask):
            self.frozen_days += 1

        r_index, r_stock = normalized_returns(self.levels, index_price, s)
        corr_lev = leverage_correction(self.levels, params)
        corr_ela = elasticity_correction(self.beta_state, self.vols, params)
        # a zero (unseeded) trailing variance maps to an infinite scale in
        # update_beta, which skips the regression advance for that day
        prev_tilde_var_index = self.vols.tilde_var_index

        levels = update_levels(self.levels, index_price, s, params, mask)
        vols = update_reactive_vols(self.vols, levels, r_index, r_stock, params, mask)
        beta_state = update_beta(
            self.beta_state, r_index, r_stock, prev_tilde_var_index,
            corr_lev, corr_ela, levels, vols, index_price, s, params, mask,
        )
        self.levels, self.vols, self.beta_state = levels, vols, beta_state
        self.day += 1
        with np.errstate(invalid="ignore", divide="ignore"):
            beta_plain = np.where(np.asarray(beta_state.var_index) > 0.0,
                                  beta_state.cross / beta_state.var_index, np.nan)
            relvol_hat = np.sqrt(np.asarray(beta_state.var_stock)
                                 / np.asarray(beta_state.var_index))
        return StepResult(
            beta=beta_state.beta,
            tilde_beta=beta_state.tilde_beta,
            sigma_index=vols.sigma_index,
            sigma_stock=vols.sigma_stock,
            corr_leverage=corr_lev,
            corr_elasticity=corr_ela,
            r_index=r_index,
            r_stock=r_stock,
            beta_plain=beta_plain,
            relvol_hat=relvol_hat,
        )


def reactive_beta_from_returns(
    r_index: np.ndarray,
    r_stock: np.ndarray,
    params: Optional[ReactiveParams] = None,
    start_price: float = 100.0,
    track: bool = False,
):
    """Run the estimator over return paths and report the final beta.

    ``r_index`` and ``r_stock`` hold arithmetic returns with time on the
    last axis; leading axes are independent paths. Prices are rebuilt
    from ``start_price`` (the estimator is scale invariant, so the level
    does not matter). With ``track=True`` the full per-day beta history
    is returned as a second array.
    """
    r_i = np.asarray(r_index, dtype=float)
    r_s = np.asarray(r_stock, dtype=float)
    if r_i.shape != r_s.shape:
        raise ValueError("return arrays must have identical shapes")
    params = params if params is not None else ReactiveParams()

    index_prices = start_price * np.cumprod(1.0 + r_i, axis=-1)
    stock_prices = start_price * np.cumprod(1.0 + r_s, axis=-1)

    engine = ReactiveBetaEngine(params)
    engine.start(np.full(r_i.shape[:-1], start_price) if r_i.ndim > 1 else start_price,
                 np.full(r_s.shape[:-1], start_price) if r_s.ndim > 1 else start_price)
    T = r_i.shape[-1]
    history = np.full(r_s.shape, np.nan) if track else None
    out = None
    for t in range(T):
        out = engine.step(index_prices[..., t], stock_prices[..., t])
        if track:
            history[..., t] = out.beta
    if track:
        return out.beta, history
    return out.beta
