"""End-to-end estimator benchmark: simulate paths, run every requested
estimator on each path, and aggregate the error statistics per model.

The per-path work is vectorized across a whole batch of paths; batches
are sized to bound memory, so the benchmark scales to the full published
path counts while staying fast at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .params import ReactiveParams
from .beta import reactive_beta_from_returns
from .estimators import (
    DEFAULT_LOOKBACK,
    dcc_beta_batch,
    ols_beta_batch,
    quantile_beta_batch,
    trimean_beta_batch,
)
from .evaluation import ErrorSamples, StatRow, table2_stats
from .montecarlo import McBatch, McConfig, generate_batch

__all__ = ["ESTIMATORS", "BenchmarkResult", "estimate_batch", "path_flags",
           "run_benchmark"]

ESTIMATORS = ("ols", "reactive", "dcc", "adcc", "mad", "trm")

#: trailing trading days defining the winner/loser split
WINNER_WINDOW = 21


def path_flags(batch: McBatch, window: int = WINNER_WINDOW):
    """Winner and low-beta flags for every path of a batch.

    A path is a winner when the stock outperformed the index over the
    last ``window`` returns (compounded); it is low-beta when the true
    conditional beta at the final time is below one.
    """
    w = min(window, batch.T)
    growth_stock = np.prod(1.0 + batch.r_stock[:, -w:], axis=1)
    growth_index = np.prod(1.0 + batch.r_index[:, -w:], axis=1)
    winner = growth_stock > growth_index
    low = batch.true_beta[:, -1] < 1.0
    return winner, low


def estimate_batch(name: str, batch: McBatch,
                   lam: float = DEFAULT_LOOKBACK,
                   params: Optional[ReactiveParams] = None) -> np.ndarray:
    """Final-time beta estimates of one estimator over a batch of paths."""
    r_s, r_i = batch.r_stock, batch.r_index
    if name == "ols":
        return ols_beta_batch(r_i, r_s, lam)
    if name == "mad":
        return quantile_beta_batch(r_i, r_s, 0.5, lam)[1]
    if name == "trm":
        return trimean_beta_batch(r_i, r_s, lam)
    if name == "dcc":
        return dcc_beta_batch(r_s, r_i, asymmetric=False, lam=lam)[0]
    if name == "adcc":
        return dcc_beta_batch(r_s, r_i, asymmetric=True, lam=lam)[0]
    if name == "reactive":
        return np.asarray(reactive_beta_from_returns(r_i, r_s, params=params))
    raise ValueError(f"unknown estimator {name!r}; expected one of {ESTIMATORS}")


@dataclass(frozen=True)
class BenchmarkResult:
    """Per-model, per-estimator statistic rows plus run metadata."""

    model: str
    n_paths: int
    T: int
    seed: int
    rows: dict  # estimator name -> StatRow
    clamped: int

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n_paths": self.n_paths,
            "T": self.T,
            "seed": self.seed,
            "clamped": self.clamped,
            "rows": {k: v.to_dict() for k, v in self.rows.items()},
        }


def run_benchmark(model: str, estimators: Sequence[str] = ("ols", "reactive"),
                  n_paths: int = 2000, T: int = 1000, seed: int = 0,
                  lam: float = DEFAULT_LOOKBACK,
                  params: Optional[ReactiveParams] = None,
                  block_size: int = 4096) -> BenchmarkResult:
    """Simulate one model and score the requested estimators against the
    true conditional beta at the final time.

    The variance ratio of every row is quoted against the least-squares
    error variance on the same paths, which is computed even when "ols"
    is not among the requested estimators.
    """
    for name in estimators:
        if name not in ESTIMATORS:
            raise ValueError(f"unknown estimator {name!r}")
    config = McConfig(model=model, T=T, n_paths=n_paths, seed=seed)

    wanted = list(dict.fromkeys(estimators))
    run_names = wanted if "ols" in wanted else ["ols"] + wanted
    estimates = {name: [] for name in run_names}
    true_final, winners, lows = [], [], []
    clamped = 0

    done = 0
    while done < n_paths:
        count = min(block_size, n_paths - done)
        batch = generate_batch(config, done, count)
        clamped += batch.clamped
        w, lo = path_flags(batch)
        winners.append(w)
        lows.append(lo)
        true_final.append(batch.true_beta[:, -1])
        for name in run_names:
            estimates[name].append(estimate_batch(name, batch, lam, params))
        done += count

    true_final = np.concatenate(true_final)
    winner = np.concatenate(winners)
    low = np.concatenate(lows)

    def _row(name: str, reference_variance: Optional[float]) -> StatRow:
        est = np.concatenate(estimates[name])
        samples = ErrorSamples(estimated_beta=est, true_beta=true_final,
                               winner=winner, low=low)
        return table2_stats(samples, reference_variance, label=name)

    ols_row = _row("ols", None)
    reference = ols_row.error_variance
    rows = {name: _row(name, reference) for name in wanted}
    return BenchmarkResult(model=model, n_paths=n_paths, T=T, seed=seed,
                           rows=rows, clamped=clamped)
