import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reactivebeta.timeseries import (
    EmaState,
    Series,
    arithmetic_returns,
    ema_update,
    exp_weighted_moments,
    exp_weights,
    rolling_correlation,
)


class TestSeries:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Series(np.array([1.0, np.nan]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Series(np.array([]))

    def test_len_and_iter(self):
        s = Series(np.array([1.0, 2.0]), "x")
        assert len(s) == 2
        assert list(s) == [1.0, 2.0]


class TestEma:
    def test_half_weight_step(self):
        state = EmaState(lam=0.5, value=1.0, initialized=True)
        assert ema_update(state, 2.0).value == pytest.approx(1.5)

    def test_unit_weight_tracks_input(self):
        state = EmaState(lam=1.0, value=7.0, initialized=True)
        assert ema_update(state, 3.0).value == 3.0

    def test_constant_input_fixed_point(self):
        state = EmaState(lam=0.0241)
        for _ in range(1000):
            state = ema_update(state, 5.0)
        assert state.value == pytest.approx(5.0, abs=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ema_update(EmaState(lam=0.5), float("inf"))

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            EmaState(lam=0.0)
        with pytest.raises(ValueError):
            EmaState(lam=1.5)

    @given(st.floats(0.01, 1.0), st.integers(1, 50),
           st.lists(st.floats(-100, 100), min_size=1, max_size=40))
    @settings(max_examples=200)
    def test_burn_in_invariance(self, lam, n_burn, xs):
        seeded = EmaState(lam=lam)
        for x in [xs[0]] * n_burn + xs:
            seeded = ema_update(seeded, x)
        direct = EmaState(lam=lam)
        for x in xs:
            direct = ema_update(direct, x)
        assert seeded.value == pytest.approx(direct.value, rel=1e-12, abs=1e-12)

    @given(st.floats(0.01, 1.0),
           st.lists(st.floats(-50, 50), min_size=1, max_size=60))
    @settings(max_examples=200)
    def test_stays_within_range(self, lam, xs):
        state = EmaState(lam=lam)
        for x in xs:
            state = ema_update(state, x)
        assert min(xs) - 1e-9 <= state.value <= max(xs) + 1e-9


class TestArithmeticReturns:
    def test_single_step(self):
        assert arithmetic_returns([100.0, 101.0]) == pytest.approx([0.01])

    def test_constant_price(self):
        assert arithmetic_returns([100.0, 100.0, 100.0]) == pytest.approx([0.0, 0.0])

    def test_geometric_growth(self):
        prices = 100.0 * 1.02 ** np.arange(5)
        rets = arithmetic_returns(prices)
        assert rets.shape == (4,)
        assert np.max(np.abs(rets - 0.02)) < 1e-12

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            arithmetic_returns([100.0, 0.0])
        with pytest.raises(ValueError):
            arithmetic_returns([100.0, -5.0])

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            arithmetic_returns([100.0])


class TestRollingCorrelation:
    def test_perfect_dependence(self):
        x = np.random.default_rng(0).standard_normal(200)
        assert rolling_correlation(x, 2.0 * x, 30) == pytest.approx(1.0, abs=1e-9)
        assert rolling_correlation(x, -x, 30) == pytest.approx(-1.0, abs=1e-9)

    def test_independent_gaussians_noise_floor(self):
        # sample std of 90-day correlations of independent series is ~1/sqrt(90)
        rng = np.random.default_rng(42)
        n = 100_000
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        corr = rolling_correlation(x, y, 90)
        # thin to roughly independent windows before taking the std
        sampled = corr[::90]
        assert np.std(sampled) == pytest.approx(1.0 / np.sqrt(90), abs=0.01)

    def test_zero_variance_window_marked(self):
        x = np.array([1.0, 1.0, 1.0, 2.0, 3.0])
        y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        out = rolling_correlation(x, y, 3)
        assert np.isnan(out[0])
        assert np.isfinite(out[-1])

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(500)
        y = 0.3 * x + rng.standard_normal(500)
        a = rolling_correlation(x, y, 20)
        b = rolling_correlation(y, x, 20)
        assert a == pytest.approx(b, rel=1e-12)
        assert np.all(np.abs(a[np.isfinite(a)]) <= 1.0)

    def test_length_and_validation(self):
        x = np.arange(10.0)
        assert rolling_correlation(x, x, 4).shape == (7,)
        with pytest.raises(ValueError):
            rolling_correlation(x, x[:5], 3)
        with pytest.raises(ValueError):
            rolling_correlation(x, x, 1)


class TestExpWeightedMoments:
    def test_constant_series(self):
        m = exp_weighted_moments(np.full(50, 3.0), np.arange(50.0), 0.1)
        assert m.var_x == pytest.approx(0.0, abs=1e-18)
        assert m.mean_x == pytest.approx(3.0)

    def test_two_point_hand_computation(self):
        # weights proportional to (0.5, 1), normalized to (1/3, 2/3)
        m = exp_weighted_moments([1.0, 4.0], [2.0, 8.0], 0.5)
        mean_x = (0.5 * 1.0 + 1.0 * 4.0) / 1.5
        assert m.mean_x == pytest.approx(mean_x)
        var_x = (0.5 * (1 - mean_x) ** 2 + 1.0 * (4 - mean_x) ** 2) / 1.5
        assert m.var_x == pytest.approx(var_x)
        assert m.cov == pytest.approx(2.0 * var_x)

    def test_iid_unit_variance_recovery(self):
        # decay small enough that the weights are nearly uniform over T
        rng = np.random.default_rng(7)
        x = rng.standard_normal(10_000)
        m = exp_weighted_moments(x, x, 2e-4)
        assert m.var_x == pytest.approx(1.0, abs=0.05)

    def test_cov_xx_equals_var(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(300)
        m = exp_weighted_moments(x, x, 0.05)
        assert m.cov == m.var_x

    def test_weights_normalized_and_increasing(self):
        w = exp_weights(100, 1.0 / 90.0)
        assert w.sum() == pytest.approx(1.0)
        assert np.all(np.diff(w) > 0)

    def test_long_series_no_underflow(self):
        w = exp_weights(1_000_000, 0.1)
        assert np.isfinite(w).all() and w[-1] > 0

    def test_validation(self):
        with pytest.raises(ValueError):
            exp_weighted_moments([1.0], [1.0, 2.0], 0.1)
        with pytest.raises(ValueError):
            exp_weights(0, 0.1)
        with pytest.raises(ValueError):
            exp_weights(10, 1.5)
