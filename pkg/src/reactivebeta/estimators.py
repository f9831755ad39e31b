"""Rival beta estimators: weighted least squares, quantile regressions
and (A)DCC conditional betas.

Every estimator weighs observations by ``(1 - lam)**(T - t)`` so that all
methods share the same effective look-back. Batch variants operate on
arrays of shape ``(n_paths, T)`` and vectorize across paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timeseries import as_array, exp_weights

__all__ = [
    "WeightedRegressionProblem",
    "ols_beta",
    "ols_beta_batch",
    "quantile_beta",
    "quantile_beta_batch",
    "quantile_objective",
    "mad_beta",
    "trimean_beta",
    "trimean_beta_batch",
    "GarchParams",
    "DccParams",
    "DccState",
    "SYMMETRIC_GARCH_COEFFS",
    "ASYMMETRIC_GARCH_COEFFS",
    "SYMMETRIC_DCC_COEFFS",
    "ASYMMETRIC_DCC_COEFFS",
    "init_dcc_state",
    "dcc_step",
    "dcc_calibrate",
    "dcc_beta",
    "dcc_beta_batch",
]

DEFAULT_LOOKBACK = 1.0 / 90.0


@dataclass(frozen=True)
class WeightedRegressionProblem:
    """Index returns ``x``, stock returns ``y`` and the decay ``lam``."""

    x: np.ndarray
    y: np.ndarray
    lam: float = DEFAULT_LOOKBACK

    def __post_init__(self) -> None:
        x = as_array(self.x)
        y = as_array(self.y)
        if x.size != y.size:
            raise ValueError("x and y must have equal length")
        if x.size < 2:
            raise ValueError("need at least two observations")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


# ---------------------------------------------------------------------------
# least squares


def ols_beta(problem: WeightedRegressionProblem, intercept: bool = True) -> float:
    """Exponentially weighted least-squares slope of y on x.

    ``intercept=True`` (the default) removes the weighted means first,
    i.e. returns weighted cov(x, y) / var(x). A zero-variance regressor
    yields NaN.
    """
    w = exp_weights(problem.x.size, problem.lam)
    x, y = problem.x, problem.y
    if intercept:
        x = x - w @ x
        y = y - w @ y
    var = float(w @ (x * x))
    if var <= 0.0:
        return float("nan")
    return float(w @ (x * y)) / var


def ols_beta_batch(x: np.ndarray, y: np.ndarray, lam: float = DEFAULT_LOOKBACK,
                   intercept: bool = True) -> np.ndarray:
    """Weighted least-squares slopes along the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = exp_weights(x.shape[-1], lam)
    if intercept:
        x = x - (x @ w)[..., None]
        y = y - (y @ w)[..., None]
    var = (x * x) @ w
    with np.errstate(invalid="ignore", divide="ignore"):
        beta = ((x * y) @ w) / var
    return np.where(var > 0.0, beta, np.nan)


# ---------------------------------------------------------------------------
# quantile regression

def _pinball(residuals: np.ndarray, theta: float) -> np.ndarray:
    return np.where(residuals >= 0.0, theta * residuals, (theta - 1.0) * residuals)


def quantile_objective(x, y, lam: float, theta: float,
                       alpha, beta) -> float | np.ndarray:
    """Normalized-weight pinball objective at (alpha, beta)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = exp_weights(x.shape[-1], lam)
    r = y - np.asarray(alpha)[..., None] - np.asarray(beta)[..., None] * x
    out = _pinball(r, theta) @ w
    return float(out) if np.ndim(out) == 0 else out


def quantile_beta_batch(x: np.ndarray, y: np.ndarray, theta: float,
                        lam: float = DEFAULT_LOOKBACK,
                        max_iter: int = 80, polish_points: int = 6):
    """Weighted quantile regression line fit along the last axis.

    Minimizes the exponentially weighted pinball loss with an intercept.
    Solved by iteratively reweighted least squares on a smoothed loss
    whose smoothing parameter is annealed towards zero, then polished by
    an exact vertex search: an optimal line passes through two data
    points, so the best line through pairs of the ``polish_points``
    smallest-residual observations is taken whenever it improves the
    objective. Returns ``(alpha, beta)`` arrays; paths with a degenerate
    regressor yield NaN.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("x and y must have identical shapes")
    n, T = x.shape
    w = exp_weights(T, lam)

    # start from the weighted least-squares line
    mx, my = x @ w, y @ w
    dx, dy = x - mx[:, None], y - my[:, None]
    var = (dx * dx) @ w
    degenerate = var <= 1e-30 * np.maximum((x * x) @ w, 1e-300)
    var_safe = np.where(degenerate, 1.0, var)
    beta = ((dx * dy) @ w) / var_safe
    alpha = my - beta * mx

    scale = np.sqrt(np.maximum((dy * dy) @ w, 1e-30))
    half = 0.5 - theta
    sum_w = 1.0  # weights are normalized
    sum_wx = mx

    for stage in range(8):
        delta = scale * 10.0 ** (-2.0 - 1.5 * stage)
        for _ in range(max_iter):
            r = y - alpha[:, None] - beta[:, None] * x
            m = w / (2.0 * np.sqrt(r * r + delta[:, None] ** 2))
            sm = m.sum(axis=1)
            smx = (m * x).sum(axis=1)
            smxx = (m * x * x).sum(axis=1)
            smy = (m * y).sum(axis=1)
            smxy = (m * x * y).sum(axis=1)
            b0 = smy - half * sum_w
            b1 = smxy - half * sum_wx
            det = sm * smxx - smx * smx
            det = np.where(det <= 0.0, np.nan, det)
            alpha_new = (b0 * smxx - b1 * smx) / det
            beta_new = (sm * b1 - smx * b0) / det
            step = np.maximum(np.abs(alpha_new - alpha), np.abs(beta_new - beta))
            ok = np.isfinite(alpha_new) & np.isfinite(beta_new)
            alpha = np.where(ok, alpha_new, alpha)
            beta = np.where(ok, beta_new, beta)
            settled = ~ok | (step <= 1e-13 * np.maximum(scale, 1.0))
            if settled.all():
                break

    # vertex polish: evaluate every line through pairs of the points with
    # the smallest current residuals and keep the best
    m = min(polish_points, T)
    if m >= 2:
        r = np.abs(y - alpha[:, None] - beta[:, None] * x)
        near = np.argpartition(r, m - 1, axis=1)[:, :m]
        px = np.take_along_axis(x, near, axis=1)
        py = np.take_along_axis(y, near, axis=1)
        ii, jj = np.triu_indices(m, k=1)
        dx_p = px[:, jj] - px[:, ii]
        with np.errstate(invalid="ignore", divide="ignore"):
            cand_beta = (py[:, jj] - py[:, ii]) / dx_p
        cand_alpha = py[:, ii] - cand_beta * px[:, ii]
        valid_pair = dx_p != 0.0

        def _objective(a, b):
            res = y - a[:, None] - b[:, None] * x
            return _pinball(res, theta) @ w

        best_obj = _objective(np.where(np.isfinite(alpha), alpha, 0.0),
                              np.where(np.isfinite(beta), beta, 0.0))
        best_obj = np.where(np.isfinite(alpha) & np.isfinite(beta), best_obj, np.inf)
        for k in range(ii.size):
            a_k, b_k = cand_alpha[:, k], cand_beta[:, k]
            ok = valid_pair[:, k] & np.isfinite(a_k) & np.isfinite(b_k)
            obj_k = _objective(np.where(ok, a_k, 0.0), np.where(ok, b_k, 0.0))
            take = ok & (obj_k < best_obj)
            alpha = np.where(take, a_k, alpha)
            beta = np.where(take, b_k, beta)
            best_obj = np.where(take, obj_k, best_obj)

    alpha = np.where(degenerate, np.nan, alpha)
    beta = np.where(degenerate, np.nan, beta)
    return alpha, beta


def quantile_beta(problem: WeightedRegressionProblem, theta: float):
    """Weighted quantile regression of a single problem; see the batch
    variant for the solver contract."""
    alpha, beta = quantile_beta_batch(problem.x[None, :], problem.y[None, :],
                                      theta, problem.lam)
    return float(alpha[0]), float(beta[0])


def mad_beta(problem: WeightedRegressionProblem) -> float:
    """Median (least absolute deviation) regression slope."""
    return quantile_beta(problem, 0.5)[1]


def trimean_beta(problem: WeightedRegressionProblem) -> float:
    """Tukey trimean of the quartile regression slopes:
    0.25 b(1/4) + 0.5 b(1/2) + 0.25 b(3/4)."""
    slopes = [quantile_beta(problem, q)[1] for q in (0.25, 0.5, 0.75)]
    return 0.25 * slopes[0] + 0.5 * slopes[1] + 0.25 * slopes[2]


def trimean_beta_batch(x: np.ndarray, y: np.ndarray,
                       lam: float = DEFAULT_LOOKBACK) -> np.ndarray:
    b25 = quantile_beta_batch(x, y, 0.25, lam)[1]
    b50 = quantile_beta_batch(x, y, 0.50, lam)[1]
    b75 = quantile_beta_batch(x, y, 0.75, lam)[1]
    return 0.25 * b25 + 0.5 * b50 + 0.25 * b75


# ---------------------------------------------------------------------------
# DCC / ADCC conditional beta

#: GARCH(1,1) dynamics coefficients for the symmetric model.
SYMMETRIC_GARCH_COEFFS = {"a": 0.099, "b": 0.89, "gamma": 0.0}
#: GJR-GARCH(1,1,1) dynamics coefficients for the asymmetric model.
ASYMMETRIC_GARCH_COEFFS = {"a": 0.0, "b": 0.901, "gamma": 0.171}
#: Correlation-process coefficients for the symmetric model.
SYMMETRIC_DCC_COEFFS = {"a_rho": 0.0079, "b_rho": 0.9261, "gamma_rho": 0.0}
#: Correlation-process coefficients for the asymmetric model.
ASYMMETRIC_DCC_COEFFS = {"a_rho": 0.0020, "b_rho": 0.9512, "gamma_rho": 0.0040}

_SIGMA_FLOOR_FRACTION = 1e-12
_RHO_CLAMP = 0.999


@dataclass(frozen=True)
class GarchParams:
    """Univariate conditional-variance dynamics and its unconditional level.

    ``unconditional_sigma`` may be an array (one level per path); the
    dynamics coefficients are always scalars.
    """

    a: float
    b: float
    gamma: float
    unconditional_sigma: np.ndarray | float

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.gamma) < 0.0:
            raise ValueError("GARCH coefficients must be non-negative")
        if self.a + self.b + self.gamma / 2.0 >= 1.0:
            raise ValueError("stationarity requires a + b + gamma/2 < 1")
        if not np.all(np.asarray(self.unconditional_sigma) > 0.0):
            raise ValueError("unconditional_sigma must be positive")


@dataclass(frozen=True)
class DccParams:
    """Correlation-process dynamics and the unconditional correlation."""

    a_rho: float
    b_rho: float
    gamma_rho: float
    rho_bar: np.ndarray | float

    def __post_init__(self) -> None:
        if min(self.a_rho, self.b_rho, self.gamma_rho) < 0.0:
            raise ValueError("correlation coefficients must be non-negative")
        if self.a_rho + self.b_rho + self.gamma_rho / 4.0 >= 1.0:
            raise ValueError("stationarity requires a_rho + b_rho + gamma_rho/4 < 1")
        rb = np.asarray(self.rho_bar)
        if not np.all((rb > -1.0) & (rb < 1.0)):
            raise ValueError("rho_bar must lie in (-1, 1)")


@dataclass(frozen=True)
class DccState:
    """Conditional vols, normalized (co)variance terms, correlation, beta."""

    sigma_stock: np.ndarray | float
    sigma_index: np.ndarray | float
    q_stock: np.ndarray | float
    q_index: np.ndarray | float
    q_cross: np.ndarray | float
    rho: np.ndarray | float
    beta: np.ndarray | float
    floored: np.ndarray | bool = False


def init_dcc_state(gp_stock: GarchParams, gp_index: GarchParams,
                   dp: DccParams, shape=()) -> DccState:
    """Start at the unconditional point: sigma at its long-run level and
    the normalized terms at (1, 1, rho_bar)."""
    ones = np.ones(shape) if shape else 1.0
    return DccState(
        sigma_stock=gp_stock.unconditional_sigma * ones,
        sigma_index=gp_index.unconditional_sigma * ones,
        q_stock=1.0 * ones,
        q_index=1.0 * ones,
        q_cross=dp.rho_bar * ones,
        rho=dp.rho_bar * ones,
        beta=dp.rho_bar * gp_stock.unconditional_sigma / gp_index.unconditional_sigma * ones,
        floored=np.zeros(shape, dtype=bool) if shape else False,
    )


def _asym_part(xi, negative_shocks: bool):
    if negative_shocks:
        return np.where(xi < 0.0, xi, 0.0)
    return np.where(xi > 0.0, xi, 0.0)


def dcc_step(state: DccState, r_stock, r_index,
             gp_stock: GarchParams, gp_index: GarchParams, dp: DccParams,
             negative_shocks: bool = True) -> DccState:
    """One (A)DCC update driven by realized returns.

    Shocks are the returns divided by yesterday's conditional vols. Both
    variances and the three normalized terms advance with yesterday's
    state and today's shocks; the correlation is the normalized cross
    term clamped into (-0.999, 0.999) and the conditional beta is
    ``rho * sigma_stock / sigma_index``.

    ``negative_shocks`` selects which sign of shock feeds the asymmetry
    terms; the default charges negative shocks, the convention under
    which falling prices raise volatility.
    """
    xi_s = np.asarray(r_stock, dtype=float) / state.sigma_stock
    xi_i = np.asarray(r_index, dtype=float) / state.sigma_index
    xm_s = _asym_part(xi_s, negative_shocks)
    xm_i = _asym_part(xi_i, negative_shocks)

    def _advance_var(sig_prev, xi, xm, gp: GarchParams):
        var_prev = sig_prev * sig_prev
        var = (1.0 - gp.a - gp.b - gp.gamma / 2.0) * gp.unconditional_sigma ** 2 \
            + var_prev * (gp.a * xi * xi + gp.b + gp.gamma * xm * xm)
        floor = _SIGMA_FLOOR_FRACTION * gp.unconditional_sigma ** 2
        return np.maximum(var, floor), var < floor

    var_s, fl_s = _advance_var(state.sigma_stock, xi_s, xm_s, gp_stock)
    var_i, fl_i = _advance_var(state.sigma_index, xi_i, xm_i, gp_index)

    base = 1.0 - dp.a_rho - dp.b_rho - dp.gamma_rho / 2.0
    q_s = base + dp.a_rho * xi_s * xi_s + dp.b_rho * state.q_stock + dp.gamma_rho * xm_s * xm_s
    q_i = base + dp.a_rho * xi_i * xi_i + dp.b_rho * state.q_index + dp.gamma_rho * xm_i * xm_i
    q_c = (1.0 - dp.a_rho - dp.b_rho - dp.gamma_rho / 4.0) * dp.rho_bar \
        + dp.a_rho * xi_s * xi_i + dp.b_rho * state.q_cross + dp.gamma_rho * xm_s * xm_i

    rho = np.clip(q_c / np.sqrt(q_s * q_i), -_RHO_CLAMP, _RHO_CLAMP)
    sigma_s, sigma_i = np.sqrt(var_s), np.sqrt(var_i)
    return DccState(
        sigma_stock=sigma_s, sigma_index=sigma_i,
        q_stock=q_s, q_index=q_i, q_cross=q_c,
        rho=rho, beta=rho * sigma_s / sigma_i,
        floored=state.floored | fl_s | fl_i,
    )


def _dcc_loglik(sigma_stock, sigma_index, rho_bar,
                r_stock: np.ndarray, r_index: np.ndarray,
                garch_coeffs: dict, dcc_coeffs: dict,
                lam: float, negative_shocks: bool = True):
    """Exponentially weighted Gaussian quasi log-likelihood of the
    filtered (A)DCC model, up to an additive constant.

    The unconditional parameters may carry any shape broadcastable with
    the path axis of ``r_stock``/``r_index`` (shape ``(n, T)``), which
    lets one likelihood pass price several candidate parameter points for
    every path at once.
    """
    sig_s = np.asarray(sigma_stock, dtype=float)
    sig_i = np.asarray(sigma_index, dtype=float)
    rho0 = np.asarray(rho_bar, dtype=float)
    T = r_stock.shape[-1]
    shape = np.broadcast_shapes(sig_s.shape, sig_i.shape, rho0.shape,
                                r_stock.shape[:-1])

    a, b, g = garch_coeffs["a"], garch_coeffs["b"], garch_coeffs["gamma"]
    ar, br, gr = dcc_coeffs["a_rho"], dcc_coeffs["b_rho"], dcc_coeffs["gamma_rho"]
    base_q = 1.0 - ar - br - gr / 2.0
    base_qc = 1.0 - ar - br - gr / 4.0

    var_s = np.broadcast_to(sig_s * sig_s, shape).copy()
    var_i = np.broadcast_to(sig_i * sig_i, shape).copy()
    q_s = np.ones(shape)
    q_i = np.ones(shape)
    q_c = np.broadcast_to(rho0, shape).copy()
    rho = np.clip(q_c / np.sqrt(q_s * q_i), -_RHO_CLAMP, _RHO_CLAMP)

    uncond_s = sig_s * sig_s
    uncond_i = sig_i * sig_i
    floor_s = _SIGMA_FLOOR_FRACTION * uncond_s
    floor_i = _SIGMA_FLOOR_FRACTION * uncond_i

    total = np.zeros(shape)
    decay = 1.0 - lam
    weight = decay ** (T - 1)
    for t in range(T):
        xi_s = r_stock[..., t] / np.sqrt(var_s)
        xi_i = r_index[..., t] / np.sqrt(var_i)
        one_m = 1.0 - rho * rho
        ll_v = -(xi_s * xi_s + xi_i * xi_i) - np.log(var_s) - np.log(var_i)
        ll_c = -np.log(one_m) \
            - (xi_s * xi_s - 2.0 * rho * xi_s * xi_i + xi_i * xi_i) / one_m \
            + (xi_s * xi_s + xi_i * xi_i)
        total += weight * (ll_v + ll_c)
        weight /= decay

        xm_s = _asym_part(xi_s, negative_shocks)
        xm_i = _asym_part(xi_i, negative_shocks)
        var_s = np.maximum((1.0 - a - b - g / 2.0) * uncond_s
                           + var_s * (a * xi_s * xi_s + b + g * xm_s * xm_s), floor_s)
        var_i = np.maximum((1.0 - a - b - g / 2.0) * uncond_i
                           + var_i * (a * xi_i * xi_i + b + g * xm_i * xm_i), floor_i)
        q_s = base_q + ar * xi_s * xi_s + br * q_s + gr * xm_s * xm_s
        q_i = base_q + ar * xi_i * xi_i + br * q_i + gr * xm_i * xm_i
        q_c = base_qc * rho0 + ar * xi_s * xi_i + br * q_c + gr * xm_s * xm_i
        rho = np.clip(q_c / np.sqrt(q_s * q_i), -_RHO_CLAMP, _RHO_CLAMP)

    return 0.5 * total


@dataclass(frozen=True)
class DccCalibration:
    sigma_stock: np.ndarray | float
    sigma_index: np.ndarray | float
    rho_bar: np.ndarray | float
    loglik: np.ndarray | float
    converged: np.ndarray | bool
    evaluations: int


def dcc_calibrate(r_stock: np.ndarray, r_index: np.ndarray,
                  garch_coeffs: dict, dcc_coeffs: dict,
                  lam: float = DEFAULT_LOOKBACK,
                  negative_shocks: bool = True,
                  budget: int = 10_000) -> DccCalibration:
    """Fit the three unconditional parameters by weighted quasi maximum
    likelihood, keeping the dynamics coefficients fixed.

    Runs a derivative-free compass search (one coordinate moves per
    accepted step) from moment-based initial guesses, with multiplicative
    steps for the two vols and additive steps for the correlation, under
    box constraints ``sigma > 0`` and ``|rho| < 0.999``. Paths whose step
    sizes did not shrink below tolerance within the evaluation budget are
    flagged unconverged and carry the best point found.
    """
    r_s = np.atleast_2d(np.asarray(r_stock, dtype=float))
    r_i = np.atleast_2d(np.asarray(r_index, dtype=float))
    if r_s.shape != r_i.shape:
        raise ValueError("return arrays must have identical shapes")
    n, T = r_s.shape
    if T < 100:
        raise ValueError("calibration needs at least 100 observations")
    w = exp_weights(T, lam)

    mx_s, mx_i = r_s @ w, r_i @ w
    d_s, d_i = r_s - mx_s[:, None], r_i - mx_i[:, None]
    sig_s = np.sqrt(np.maximum((d_s * d_s) @ w, 1e-20))
    sig_i = np.sqrt(np.maximum((d_i * d_i) @ w, 1e-20))
    rho = np.clip(((d_s * d_i) @ w) / (sig_s * sig_i), -0.95, 0.95)

    def objective(cs, ci, cr):
        return _dcc_loglik(cs, ci, cr, r_s, r_i, garch_coeffs, dcc_coeffs,
                           lam, negative_shocks)

    best = objective(sig_s, sig_i, rho)
    evaluations = n

    step_sig = np.full(n, 1.30)   # multiplicative
    step_rho = np.full(n, 0.15)   # additive
    tol_sig, tol_rho = 1.0 + 1e-4, 1e-4
    max_sweeps = max(1, budget // 6)  # six evaluations per path per sweep

    for _ in range(max_sweeps):
        active = (step_sig > tol_sig) | (step_rho > tol_rho)
        if not active.any():
            break
        cand_s = np.stack([sig_s * step_sig, sig_s / step_sig, sig_s, sig_s, sig_s, sig_s])
        cand_i = np.stack([sig_i, sig_i, sig_i * step_sig, sig_i / step_sig, sig_i, sig_i])
        cand_r = np.stack([rho, rho, rho, rho,
                           np.clip(rho + step_rho, -_RHO_CLAMP, _RHO_CLAMP),
                           np.clip(rho - step_rho, -_RHO_CLAMP, _RHO_CLAMP)])
        vals = objective(cand_s, cand_i, cand_r)
        evaluations += 6 * n
        pick = np.argmax(vals, axis=0)
        val_best = np.take_along_axis(vals, pick[None, :], axis=0)[0]
        improved = val_best > best + 1e-12 * np.abs(best)
        take = improved & active
        sig_s = np.where(take, np.take_along_axis(cand_s, pick[None, :], axis=0)[0], sig_s)
        sig_i = np.where(take, np.take_along_axis(cand_i, pick[None, :], axis=0)[0], sig_i)
        rho = np.where(take, np.take_along_axis(cand_r, pick[None, :], axis=0)[0], rho)
        best = np.where(take, val_best, best)
        shrink = active & ~improved
        step_sig = np.where(shrink, 1.0 + (step_sig - 1.0) * 0.5, step_sig)
        step_rho = np.where(shrink, step_rho * 0.5, step_rho)

    converged = (step_sig <= tol_sig) & (step_rho <= tol_rho)
    return DccCalibration(
        sigma_stock=sig_s, sigma_index=sig_i, rho_bar=rho,
        loglik=best, converged=converged, evaluations=evaluations,
    )


def dcc_beta_batch(r_stock: np.ndarray, r_index: np.ndarray,
                   asymmetric: bool = False,
                   lam: float = DEFAULT_LOOKBACK,
                   negative_shocks: bool = True):
    """Calibrate the unconditional parameters, filter the whole path and
    return the conditional beta at the final time, with a per-path
    convergence flag."""
    r_s = np.atleast_2d(np.asarray(r_stock, dtype=float))
    r_i = np.atleast_2d(np.asarray(r_index, dtype=float))
    gcoef = ASYMMETRIC_GARCH_COEFFS if asymmetric else SYMMETRIC_GARCH_COEFFS
    dcoef = ASYMMETRIC_DCC_COEFFS if asymmetric else SYMMETRIC_DCC_COEFFS
    cal = dcc_calibrate(r_s, r_i, gcoef, dcoef, lam, negative_shocks)

    n, T = r_s.shape
    # dcc_step is elementwise, so array-valued unconditional sigmas run the
    # filter for every path at once
    gp_s = GarchParams(unconditional_sigma=np.asarray(cal.sigma_stock), **gcoef)
    gp_i = GarchParams(unconditional_sigma=np.asarray(cal.sigma_index), **gcoef)
    dp = DccParams(rho_bar=np.asarray(cal.rho_bar), **dcoef)
    state = init_dcc_state(gp_s, gp_i, dp, shape=(n,))
    for t in range(T):
        state = dcc_step(state, r_s[:, t], r_i[:, t], gp_s, gp_i, dp,
                         negative_shocks=negative_shocks)
    return np.asarray(state.beta), cal


def dcc_beta(r_stock, r_index, asymmetric: bool = False,
             lam: float = DEFAULT_LOOKBACK,
             negative_shocks: bool = True) -> float:
    """Conditional beta at the final observation of a single path."""
    beta, _ = dcc_beta_batch(np.asarray(r_stock, dtype=float)[None, :],
                             np.asarray(r_index, dtype=float)[None, :],
                             asymmetric=asymmetric, lam=lam,
                             negative_shocks=negative_shocks)
    return float(beta[0])
