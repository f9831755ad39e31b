"""Primitive recursions and statistics shared by every other module.

All functions work on plain one-dimensional float arrays. A thin
:class:`Series` wrapper carries a label and validates the invariants
expected at the package boundary (finite values, non-empty).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

__all__ = [
    "Series",
    "EmaState",
    "ema_update",
    "arithmetic_returns",
    "rolling_correlation",
    "exp_weighted_moments",
    "exp_weights",
    "as_array",
]


def as_array(values) -> np.ndarray:
    """Coerce array-like or :class:`Series` input to a 1-d float array."""
    if isinstance(values, Series):
        return values.values
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d series, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Series:
    """An ordered list of daily real values with an identifying label."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"Series must be 1-d, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("Series must hold at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"Series {self.label!r} contains non-finite values")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self) -> Iterable[float]:
        return iter(self.values)

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class EmaState:
    """State of a single exponential moving average.

    Until the first update the state is a pure placeholder; the first
    observation seeds ``value`` so the recursion starts bias-free.
    """

    lam: float
    value: float = 0.0
    initialized: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"EMA weight must lie in (0, 1], got {self.lam}")


def ema_update(state: EmaState, x: float) -> EmaState:
    """Advance an EMA by one observation.

    ``value' = (1 - lam) * value + lam * x``; an uninitialized state is
    seeded with ``x`` itself.
    """
    if not np.isfinite(x):
        raise ValueError(f"EMA input must be finite, got {x}")
    if not state.initialized:
        return replace(state, value=float(x), initialized=True)
    return replace(state, value=(1.0 - state.lam) * state.value + state.lam * float(x))


def arithmetic_returns(prices) -> np.ndarray:
    """Day-over-day arithmetic returns ``(P_t - P_{t-1}) / P_{t-1}``.

    Requires strictly positive prices and at least two observations.
    """
    p = as_array(prices)
    if p.size < 2:
        raise ValueError("need at least two prices to form returns")
    if np.any(p <= 0.0):
        bad = int(np.argmax(p <= 0.0))
        raise ValueError(f"prices must be strictly positive (offending index {bad})")
    return np.diff(p) / p[:-1]


def rolling_correlation(x, y, window: int) -> np.ndarray:
    """Pearson correlation over each trailing window.

    Returns an array of length ``len(x) - window + 1``. Windows in which
    either input has zero variance yield NaN, the explicit marker for an
    undefined correlation; downstream aggregates skip and count those.
    """
    xa, ya = as_array(x), as_array(y)
    if xa.size != ya.size:
        raise ValueError("series must have equal length")
    if window < 2:
        raise ValueError("window must be >= 2")
    if xa.size < window:
        raise ValueError("series shorter than window")

    def _win_sums(a: np.ndarray) -> np.ndarray:
        c = np.concatenate(([0.0], np.cumsum(a)))
        return c[window:] - c[:-window]

    n = float(window)
    sx, sy = _win_sums(xa), _win_sums(ya)
    sxx, syy, sxy = _win_sums(xa * xa), _win_sums(ya * ya), _win_sums(xa * ya)
    var_x = sxx / n - (sx / n) ** 2
    var_y = syy / n - (sy / n) ** 2
    cov = sxy / n - (sx / n) * (sy / n)
    # cumulative sums cancel imperfectly on constant windows; treat any
    # variance below the attainable rounding floor as zero
    floor_x = 1e-14 * np.maximum(sxx / n, 1e-300)
    floor_y = 1e-14 * np.maximum(syy / n, 1e-300)
    ok = (var_x > floor_x) & (var_y > floor_y)
    out = np.full(var_x.shape, np.nan)
    np.divide(cov, np.sqrt(np.maximum(var_x, 1e-300) * np.maximum(var_y, 1e-300)),
              out=out, where=ok)
    np.clip(out, -1.0, 1.0, out=out)
    out[~ok] = np.nan
    return out


@dataclass(frozen=True)
class WeightedMoments:
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov: float


def exp_weights(n: int, lam: float) -> np.ndarray:
    """Weights ``(1 - lam)**(n - 1 - t)`` for t = 0..n-1, normalized to sum 1."""
    if n < 1:
        raise ValueError("need at least one observation")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"decay must lie in (0, 1), got {lam}")
    # build in log space so very long series do not underflow
    logw = np.arange(n - 1, -1, -1, dtype=float) * np.log1p(-lam)
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def exp_weighted_moments(x, y, lam: float) -> WeightedMoments:
    """Exponentially weighted means, variances and covariance.

    The most recent observation carries the largest weight; weights are
    ``(1 - lam)**(T - t)`` normalized to sum one.
    """
    xa, ya = as_array(x), as_array(y)
    if xa.size != ya.size:
        raise ValueError("series must have equal length")
    w = exp_weights(xa.size, lam)
    mx = float(w @ xa)
    my = float(w @ ya)
    dx, dy = xa - mx, ya - my
    return WeightedMoments(
        mean_x=mx,
        mean_y=my,
        var_x=float(w @ (dx * dx)),
        var_y=float(w @ (dy * dy)),
        cov=float(w @ (dx * dy)),
    )
