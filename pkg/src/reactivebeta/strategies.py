"""Beta-neutral factor construction and daily-rebalanced backtests.

Four classic long/short strategies (low volatility, short-term reversal,
momentum, size) are built per supersector: stocks are ranked by the
strategy indicator computed from data available before the position
date, the top and bottom quantiles form the legs, weights are inverse to
each stock's volatility (capped), and two leg multipliers enforce exact
beta neutrality against the chosen beta estimates. Hedging can use
either the plain exponentially weighted least-squares betas or the
leverage-aware ones, which is the comparison the backtest reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .params import ReactiveParams
from .beta import ReactiveBetaEngine
from .evaluation import HedgeReport, strategy_bias_corstd
from .timeseries import Series
from .volatility import init_levels, update_levels

__all__ = [
    "STRATEGIES",
    "Universe",
    "UniversePanels",
    "FactorWeights",
    "BacktestResult",
    "auto_supersectors",
    "compute_panels",
    "indicator",
    "build_factor",
    "backtest",
    "synthetic_universe",
]

STRATEGIES = ("low_vol", "reversal", "momentum", "size")

#: default selection quantile per strategy
STRATEGY_QUANTILE = {"low_vol": 0.30, "reversal": 0.15,
                     "momentum": 0.15, "size": 0.30}

#: indicator look-back in trading days (0 = uses current snapshot)
INDICATOR_WINDOW = {"low_vol": 0, "reversal": 21, "momentum": 504, "size": 0}

N_SUPERSECTORS = 6


@dataclass(frozen=True)
class Universe:
    """Aligned daily price panel with capitalizations and sector labels.

    ``prices`` and ``caps`` are (time x stock) arrays; missing prices are
    NaN and freeze the affected stock downstream.
    """

    dates: np.ndarray
    tickers: tuple
    prices: np.ndarray
    index_prices: np.ndarray
    supersector: np.ndarray
    caps: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        T, n = self.prices.shape
        if len(self.dates) != T:
            raise ValueError("dates and price rows differ in length")
        if len(self.tickers) != n:
            raise ValueError("tickers and price columns differ in length")
        if self.index_prices.shape != (T,):
            raise ValueError("index series misaligned with the panel")
        if self.supersector.shape != (n,):
            raise ValueError("every stock needs a supersector label")
        if self.caps is not None and self.caps.shape != (T, n):
            raise ValueError("caps panel misaligned with prices")

    @property
    def n_stocks(self) -> int:
        return self.prices.shape[1]

    @property
    def n_days(self) -> int:
        return self.prices.shape[0]


def auto_supersectors(caps_or_universe, n_groups: int = N_SUPERSECTORS) -> np.ndarray:
    """Partition stocks into similarly sized groups by capitalization rank.

    Intended for synthetic universes without real sector data; real data
    should supply its own labels.
    """
    if isinstance(caps_or_universe, Universe):
        caps = caps_or_universe.caps
        if caps is None:
            caps = caps_or_universe.prices
    else:
        caps = np.asarray(caps_or_universe, dtype=float)
    mean_cap = np.nanmean(np.atleast_2d(caps), axis=0)
    order = np.argsort(np.argsort(-mean_cap, kind="stable"), kind="stable")
    return (order * n_groups) // mean_cap.size


@dataclass(frozen=True)
class UniversePanels:
    """Per-day estimator tracks aligned with a universe.

    ``ols_beta``/``ols_sigma`` come from plain exponentially weighted
    moments of raw returns; ``re_beta``/``re_sigma`` from the
    leverage-aware engine. All shapes are (time x stock).
    """

    returns: np.ndarray
    index_returns: np.ndarray
    ols_beta: np.ndarray
    ols_sigma: np.ndarray
    re_beta: np.ndarray
    re_sigma: np.ndarray


def compute_panels(universe: Universe,
                   params: Optional[ReactiveParams] = None) -> UniversePanels:
    """Run both beta estimators over the whole panel once."""
    params = params if params is not None else ReactiveParams()
    prices = universe.prices
    index = universe.index_prices
    T, n = prices.shape

    with np.errstate(invalid="ignore"):
        returns = prices[1:] / prices[:-1] - 1.0
    returns = np.vstack([np.full((1, n), np.nan), returns])
    index_returns = np.concatenate([[np.nan], index[1:] / index[:-1] - 1.0])

    lam_b, lam_s = params.lambda_beta, params.lambda_sigma
    # per-stock weight masses so frozen (missing-price) stocks keep exact
    # exponentially weighted moments
    ema_mass = np.zeros(n)
    ema = {k: np.zeros(n) for k in ("x", "y", "xx", "xy")}
    vol_mass = np.zeros(n)
    ema_yy = np.zeros(n)
    ols_beta = np.full((T, n), np.nan)
    ols_sigma = np.full((T, n), np.nan)
    re_beta = np.full((T, n), np.nan)
    re_sigma = np.full((T, n), np.nan)

    engine = ReactiveBetaEngine(params)
    engine.start(index[0], prices[0])

    for t in range(1, T):
        out = engine.step(index[t], prices[t])
        re_beta[t] = out.beta
        re_sigma[t] = out.sigma_stock

        x = index_returns[t]
        y = returns[t]
        ok = np.isfinite(y)
        y0 = np.where(ok, y, 0.0)
        decay = np.where(ok, 1.0 - lam_b, 1.0)
        gain = np.where(ok, lam_b, 0.0)
        ema_mass = decay * ema_mass + gain
        ema["x"] = decay * ema["x"] + gain * x
        ema["y"] = decay * ema["y"] + gain * y0
        ema["xx"] = decay * ema["xx"] + gain * x * x
        ema["xy"] = decay * ema["xy"] + gain * x * y0
        decay_s = np.where(ok, 1.0 - lam_s, 1.0)
        gain_s = np.where(ok, lam_s, 0.0)
        vol_mass = decay_s * vol_mass + gain_s
        ema_yy = decay_s * ema_yy + gain_s * y0 * y0

        with np.errstate(invalid="ignore", divide="ignore"):
            mean_x = ema["x"] / ema_mass
            mean_y = ema["y"] / ema_mass
            var_x = ema["xx"] / ema_mass - mean_x * mean_x
            cov = ema["xy"] / ema_mass - mean_x * mean_y
            ols_beta[t] = np.where(var_x > 0.0, cov / var_x, np.nan)
            mean_yy = ema_yy / vol_mass
        ols_sigma[t] = np.sqrt(np.maximum(mean_yy - mean_y * mean_y, 0.0))

    return UniversePanels(returns=returns, index_returns=index_returns,
                          ols_beta=ols_beta, ols_sigma=ols_sigma,
                          re_beta=re_beta, re_sigma=re_sigma)


def indicator(strategy: str, universe: Universe, t: int,
              panels: UniversePanels,
              low_vol_long_high_beta: bool = True) -> np.ndarray:
    """Ranking values at day ``t``; higher values go into the long leg.

    Low volatility ranks on the plain least-squares beta (selection always
    uses the standard estimate, whatever hedges the factor); reversal
    flips the sign of the one-month return so losers rank first; momentum
    uses the two-year return; size the capitalization. Stocks lacking the
    required history return NaN and are excluded for the day.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy == "low_vol":
        vals = panels.ols_beta[t].copy()
        return vals if low_vol_long_high_beta else -vals
    if strategy == "size":
        if universe.caps is None:
            raise ValueError("size strategy requires capitalization data")
        return universe.caps[t].copy()
    window = INDICATOR_WINDOW[strategy]
    if t - window < 0:
        return np.full(universe.n_stocks, np.nan)
    with np.errstate(invalid="ignore"):
        growth = universe.prices[t] / universe.prices[t - window] - 1.0
    return -growth if strategy == "reversal" else growth


@dataclass(frozen=True)
class FactorWeights:
    """Aggregated per-stock weights for one position date.

    The beta-neutrality condition holds per supersector and therefore in
    aggregate; sector weights are averaged so the gross exposure stays at
    or below one.
    """

    date: object
    tickers: tuple
    weights: np.ndarray
    mu_plus: dict
    mu_minus: dict
    p: float

    def gross(self) -> float:
        return float(np.abs(self.weights).sum())


def build_factor(universe: Universe, t: int, strategy: str,
                 panels: UniversePanels, beta_source: str = "ols",
                 p: Optional[float] = None,
                 low_vol_long_high_beta: bool = True) -> Optional[FactorWeights]:
    """Construct beta-neutral weights for position date ``t + 1`` from
    data available through day ``t``.

    Per supersector: rank by indicator (ties broken by ticker), select the
    top and bottom ``round(p * N)`` stocks (at least one, never
    overlapping), weight them inversely to volatility capped at the
    sector mean, then scale whichever leg carries the larger aggregate
    beta so the sector satisfies exact neutrality; the non-reduced leg's
    multiplier is pinned at ``1 / (2k)`` for leg size ``k``, which keeps
    the sector gross exposure at one. Returns None (factor skipped) when
    any sector's neutrality is unsolvable.
    """
    if beta_source not in ("ols", "reactive"):
        raise ValueError("beta_source must be 'ols' or 'reactive'")
    p = STRATEGY_QUANTILE[strategy] if p is None else p
    if not 0.0 < p <= 0.5:
        raise ValueError("quantile p must lie in (0, 0.5]")

    ind = indicator(strategy, universe, t, panels, low_vol_long_high_beta)
    beta = panels.ols_beta[t] if beta_source == "ols" else panels.re_beta[t]
    sigma = panels.ols_sigma[t] if beta_source == "ols" else panels.re_sigma[t]

    n = universe.n_stocks
    weights = np.zeros(n)
    mu_plus: dict = {}
    mu_minus: dict = {}
    tick_order = np.arange(n)
    sectors_used = 0

    for sector in np.unique(universe.supersector):
        members = np.flatnonzero(universe.supersector == sector)
        ok = np.isfinite(ind[members]) & np.isfinite(beta[members]) \
            & np.isfinite(sigma[members]) & (sigma[members] > 0.0) \
            & np.isfinite(universe.prices[t, members])
        eligible = members[ok]
        N = eligible.size
        k = int(np.rint(p * N))
        k = max(k, 1)
        k = min(k, N // 2)
        if k < 1:
            continue

        order = eligible[np.lexsort((tick_order[eligible], -ind[eligible]))]
        long_leg = order[:k]
        short_leg = order[-k:]

        sig = sigma[order]
        sigma_mean = float(sig.mean())
        base = np.minimum(1.0, sigma_mean / sigma[order])
        base_map = dict(zip(order, base))

        b_plus = float(sum(beta[i] * base_map[i] for i in long_leg))
        b_minus = float(sum(beta[i] * base_map[i] for i in short_leg))
        if b_plus <= 0.0 or b_minus <= 0.0:
            return None

        cap = 1.0 / (2.0 * k)
        if b_plus >= b_minus:
            mu_m = cap
            mu_p = cap * b_minus / b_plus
        else:
            mu_p = cap
            mu_m = cap * b_plus / b_minus
        mu_plus[int(sector)] = mu_p
        mu_minus[int(sector)] = mu_m
        for i in long_leg:
            weights[i] = mu_p * base_map[i]
        for i in short_leg:
            weights[i] = -mu_m * base_map[i]
        sectors_used += 1

    if sectors_used == 0:
        return None
    weights /= sectors_used
    date = universe.dates[t + 1] if t + 1 < universe.n_days else universe.dates[-1]
    return FactorWeights(date=date, tickers=universe.tickers, weights=weights,
                         mu_plus=mu_plus, mu_minus=mu_minus, p=p)


@dataclass(frozen=True)
class BacktestResult:
    strategy: str
    beta_source: str
    dates: np.ndarray
    returns: Series
    report: HedgeReport
    skipped_days: int
    weights: Optional[list] = field(default=None, repr=False)


def backtest(universe: Universe, strategy: str, beta_source: str = "ols",
             params: Optional[ReactiveParams] = None,
             p: Optional[float] = None,
             panels: Optional[UniversePanels] = None,
             keep_weights: bool = False,
             low_vol_long_high_beta: bool = True) -> BacktestResult:
    """Daily-rebalanced backtest of one strategy under one beta source.

    Position weights for day ``d`` are built from data through ``d - 1``;
    the factor return on day ``d`` is the weighted sum of that day's
    stock returns (missing returns contribute zero, matching the frozen
    price). The report quotes the hedge bias (full-sample correlation
    with the index) and the dispersion of its 90-day rolling correlation.
    """
    params = params if params is not None else ReactiveParams()
    if panels is None:
        panels = compute_panels(universe, params)
    window = INDICATOR_WINDOW[strategy]
    start = max(params.burn_in, window + 1, 90)
    T = universe.n_days
    if T - 1 - start <= 91:
        raise ValueError("universe too short for this strategy's warm-up")

    rets, dates, kept = [], [], []
    skipped = 0
    for d in range(start + 1, T):
        fw = build_factor(universe, d - 1, strategy, panels, beta_source, p,
                          low_vol_long_high_beta)
        if fw is None:
            skipped += 1
            continue
        day_ret = np.where(np.isfinite(panels.returns[d]), panels.returns[d], 0.0)
        rets.append(float(fw.weights @ day_ret))
        dates.append(universe.dates[d])
        if keep_weights:
            kept.append(fw)

    if len(rets) < 92:
        raise ValueError("not enough tradable days after warm-up")
    rets_arr = np.asarray(rets)
    date_pos = {d: i for i, d in enumerate(universe.dates)}
    idx = np.array([panels.index_returns[date_pos[d]] for d in dates])
    report = strategy_bias_corstd(rets_arr, idx)
    return BacktestResult(
        strategy=strategy, beta_source=beta_source,
        dates=np.asarray(dates), returns=Series(rets_arr, f"{strategy}-{beta_source}"),
        report=report, skipped_days=skipped,
        weights=kept if keep_weights else None,
    )


# ---------------------------------------------------------------------------
# synthetic universe (level-driven dynamics shared across stocks)


def synthetic_universe(n_stocks: int = 100, T: int = 1400, seed: int = 0,
                       index_vol: float = 0.15, stock_vol: float = 0.40,
                       params: Optional[ReactiveParams] = None,
                       annualization: int = 255) -> Universe:
    """Generate a panel whose conditional betas move with stock over- and
    underperformance, the dynamics the leverage-aware estimator targets.

    One index drives all stocks; normalized returns with unit normalized
    beta are mapped through the price-level recursion, so measured betas
    drift as each stock's price diverges from its slow average. Caps are
    fixed share counts times prices; supersectors are auto-partitioned.
    """
    params = params if params is not None else ReactiveParams()
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 9001])))
    s_index = index_vol / np.sqrt(annualization)
    s_resid = np.sqrt(stock_vol ** 2 - index_vol ** 2) / np.sqrt(annualization)

    index_prices = np.empty(T)
    prices = np.empty((T, n_stocks))
    index_prices[0] = 100.0
    prices[0] = 100.0
    levels = init_levels(100.0, np.full(n_stocks, 100.0))

    for t in range(1, T):
        tr_index = s_index * rng.standard_normal()
        tr_stock = tr_index + s_resid * rng.standard_normal(n_stocks)
        new_index = index_prices[t - 1] + tr_index * levels.index_level
        new_stock = prices[t - 1] + tr_stock * levels.stock_level
        new_index = max(new_index, 0.05 * index_prices[t - 1])
        new_stock = np.maximum(new_stock, 0.05 * prices[t - 1])
        levels = update_levels(levels, new_index, new_stock, params)
        index_prices[t] = new_index
        prices[t] = new_stock

    shares = np.exp(rng.normal(0.0, 1.0, n_stocks))
    caps = prices * shares[None, :]
    tickers = tuple(f"S{i:03d}" for i in range(n_stocks))
    supersector = auto_supersectors(caps)
    return Universe(dates=np.arange(T), tickers=tickers, prices=prices,
                    index_prices=index_prices, supersector=supersector,
                    caps=caps)
