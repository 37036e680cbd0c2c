import math

import numpy as np
import pytest

from coinvent.errors import (
    DegenerateSample,
    EmptySample,
    InsufficientData,
    MissingBins,
    SampleTooSmall,
)
from coinvent.stats import (
    LagHistogram,
    LogNormalFit,
    adjust_zero_peak,
    bin_index,
    fit_lognormal,
    histogram,
    log_shift_welch,
    raw_summary,
    subsample_welch,
    welch_t,
)

from oracles import histogram_naive, welch_by_hand


# ---------------------------------------------------------------- histogram

def test_histogram_zero_centered_bin():
    hist = histogram([0.0, 0.5, -0.5], 2.0)
    assert list(hist.centers) == [0.0]
    assert list(hist.counts) == [3]


def test_histogram_edge_rule():
    hist = histogram([1.0], 2.0)
    assert list(hist.centers) == [2.0]  # [1, 3) belongs to the bin centered at 2
    assert bin_index(1.0, 2.0) == 1
    assert bin_index(0.999, 2.0) == 0
    assert bin_index(-1.0, 2.0) == 0
    assert bin_index(-1.001, 2.0) == -1


def test_histogram_matches_naive_loop():
    rng = np.random.default_rng(12)
    lags = -6.0 + rng.lognormal(math.log(25), 0.55, size=1000)
    hist = histogram(lags, 2.0)
    expected = histogram_naive(lags, 2.0)
    ours = {float(c): int(n) for c, n in zip(hist.centers, hist.counts) if n > 0}
    assert ours == expected
    assert hist.total == len(lags)


def test_histogram_total_conservation_property():
    rng = np.random.default_rng(3)
    for _ in range(20):
        lags = rng.normal(10, 30, size=int(rng.integers(1, 200)))
        width = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        assert histogram(lags, width).total == len(lags)


# -------------------------------------------------------------- raw summary

def test_raw_summary_single_lag():
    stats = raw_summary([7.0], 2.0)
    assert stats.mean == 7.0
    assert stats.median == 7.0
    assert stats.mode == 8.0  # bin [7, 9) is centered at 8


def test_raw_summary_mode_lowest_bin_on_ties():
    stats = raw_summary([0.0, 0.1, 4.0, 4.1], 2.0)
    assert stats.mode == 0.0


def test_raw_summary_empty():
    with pytest.raises(EmptySample):
        raw_summary([], 2.0)


# ---------------------------------------------------------------- welch

def test_welch_identical_samples():
    result = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.t == 0.0
    assert result.p_value == pytest.approx(1.0)


def test_welch_hand_example():
    a, b = [1.0, 2.0, 3.0], [2.0, 3.0, 4.0]
    t_ref, df_ref = welch_by_hand(a, b)
    result = welch_t(a, b)
    assert result.t == pytest.approx(t_ref, abs=1e-12)
    assert result.df == pytest.approx(df_ref, abs=1e-12)
    assert result.t == pytest.approx(-1.0 / math.sqrt(2.0 / 3.0), abs=1e-12)
    assert result.df == pytest.approx(4.0, abs=1e-12)


def test_welch_antisymmetry_and_invariances():
    rng = np.random.default_rng(5)
    a = rng.normal(10, 3, 40)
    b = rng.normal(12, 5, 60)
    fwd = welch_t(a, b)
    rev = welch_t(b, a)
    assert fwd.t == pytest.approx(-rev.t, abs=1e-12)
    assert fwd.p_value == pytest.approx(rev.p_value, abs=1e-12)
    shifted = welch_t(a + 100.0, b + 100.0)
    assert shifted.t == pytest.approx(fwd.t, abs=1e-10)
    scaled = welch_t(a * 37.0, b * 37.0)
    assert scaled.t == pytest.approx(fwd.t, abs=1e-10)


def test_welch_degenerate():
    with pytest.raises(DegenerateSample):
        welch_t([5.0, 5.0, 5.0], [7.0, 7.0])


def test_t_cdf_against_published_critical_values():
    # two-sided 5% critical values of Student's t
    for df, critical in ((1, 12.706), (10, 2.228), (100, 1.984)):
        a = np.zeros(2)  # unused; call the p-value computation directly
        from scipy import stats as sps

        p = 2.0 * sps.t.sf(critical, df)
        assert p == pytest.approx(0.05, abs=5e-4)


def test_log_shift_constants():
    result = log_shift_welch([1.0, 2.0, 5.0], [1.5, 3.0, 4.0])
    assert result.shift_constant == 0.0
    result = log_shift_welch([-6.0, 2.0, 5.0], [1.5, 3.0, 4.0])
    assert result.shift_constant == 7.0
    assert math.isfinite(result.t)


def test_log_shift_null_monte_carlo():
    rng = np.random.default_rng(99)
    small = 0
    trials = 40
    for _ in range(trials):
        a = -6.0 + rng.lognormal(3.0, 0.5, 400)
        b = -6.0 + rng.lognormal(3.0, 0.5, 400)
        if abs(log_shift_welch(a, b).t) < 2.0:
            small += 1
    assert small >= int(0.9 * trials)


# ------------------------------------------------------------- subsampling

def test_subsample_deterministic_and_null():
    rng = np.random.default_rng(1)
    a = rng.normal(0, 1, 600)
    r1 = subsample_welch(a, a, k=300, reps=100, seed=5)
    r2 = subsample_welch(a, a, k=300, reps=100, seed=5)
    assert r1.mean_t == r2.mean_t
    assert abs(r1.mean_t) < 3.0 / math.sqrt(100)  # 3 SE of the MC mean
    assert abs(r1.significant_fraction - 0.05) < 0.1


def test_subsample_k_equals_n_collapses_to_full_test():
    rng = np.random.default_rng(2)
    a = rng.normal(0, 1, 50)
    b = rng.normal(0.5, 1, 50)
    full = welch_t(a, b)
    result = subsample_welch(a, b, k=50, reps=7, seed=0)
    assert result.mean_t == pytest.approx(full.t, abs=1e-12)
    assert result.significant_fraction in (0.0, 1.0)


def test_subsample_too_small():
    with pytest.raises(SampleTooSmall):
        subsample_welch([1.0, 2.0], [1.0, 2.0], k=300)


def test_subsample_mean_converges_across_seeds():
    rng = np.random.default_rng(77)
    a = rng.normal(0.0, 1.0, 800)
    b = rng.normal(0.2, 1.0, 800)
    r1 = subsample_welch(a, b, k=300, reps=5000, seed=10)
    r2 = subsample_welch(a, b, k=300, reps=5000, seed=999)
    assert abs(r1.mean_t - r2.mean_t) < 0.1


# ------------------------------------------------------------------- fits

def test_fit_recovers_generating_parameters():
    rng = np.random.default_rng(42)
    gamma, mu, sigma = -6.0, math.log(25.0), 0.55
    draws = gamma + rng.lognormal(mu, sigma, size=50_000)
    fit = fit_lognormal(histogram(draws, 2.0))
    assert abs(fit.shift - gamma) <= 3.0 * fit.shift_se
    assert abs(fit.mu - mu) <= 3.0 * fit.mu_se
    assert abs(fit.sigma - sigma) <= 3.0 * fit.sigma_se
    stats = fit.derived_stats()
    assert stats.mode <= stats.median <= stats.mean


def test_fit_derived_ordering_random_parameters():
    rng = np.random.default_rng(6)
    for _ in range(20):
        fit = LogNormalFit(
            shift=float(rng.uniform(-10, 0)),
            mu=float(rng.uniform(1, 4)),
            sigma=float(rng.uniform(0.05, 1.5)),
            shift_se=0.0, mu_se=0.0, sigma_se=0.0, ssr=0.0, n_bins=0,
        )
        stats = fit.derived_stats()
        assert stats.mode <= stats.median <= stats.mean


def test_fit_sigma_to_zero_degenerates():
    fit = LogNormalFit(2.0, math.log(10.0), 1e-9, 0, 0, 0, 0.0, 0)
    stats = fit.derived_stats()
    assert stats.mean == pytest.approx(12.0, abs=1e-6)
    assert stats.median == pytest.approx(12.0, abs=1e-6)
    assert stats.mode == pytest.approx(12.0, abs=1e-6)


def test_fit_insufficient_bins():
    with pytest.raises(InsufficientData):
        fit_lognormal(histogram([1.0, 1.2, 3.0, 5.2, 7.1], 2.0))


def test_fit_excluding_zero_bin_ignores_spike():
    rng = np.random.default_rng(9)
    base = -4.0 + rng.lognormal(3.0, 0.5, 20_000)
    spiked = np.concatenate([base, np.zeros(4000)])
    fit = fit_lognormal(histogram(spiked, 2.0), exclude_zero_bin=True)
    assert fit.excluded_zero_bin
    clean_fit = fit_lognormal(histogram(base, 2.0))
    assert fit.mu == pytest.approx(clean_fit.mu, abs=0.1)


# -------------------------------------------------------- zero-peak surgery

def spiked_histogram():
    counts = np.array([5, 10, 50, 12, 7])
    centers = np.array([-4.0, -2.0, 0.0, 2.0, 4.0])
    return LagHistogram(2.0, centers, counts)


def test_interpolate_sets_average_of_neighbors():
    adjusted = adjust_zero_peak(spiked_histogram(), "interpolate")
    assert adjusted.counts[adjusted.index_of_center(0.0)] == 11
    assert adjusted.total == 5 + 10 + 11 + 12 + 7


def test_interpolate_noop_when_flat():
    hist = LagHistogram(2.0, np.array([-2.0, 0.0, 2.0]), np.array([8, 8, 8]))
    adjusted = adjust_zero_peak(hist, "interpolate")
    assert list(adjusted.counts) == [8, 8, 8]


def test_remove_deletes_bin_and_total():
    hist = spiked_histogram()
    adjusted = adjust_zero_peak(hist, "remove")
    assert adjusted.index_of_center(0.0) is None
    assert adjusted.total == hist.total - 50


def test_adjust_missing_bins():
    hist = LagHistogram(2.0, np.array([2.0, 4.0]), np.array([3, 4]))
    with pytest.raises(MissingBins):
        adjust_zero_peak(hist, "interpolate")
    hist = LagHistogram(2.0, np.array([0.0, 2.0]), np.array([3, 4]))
    with pytest.raises(MissingBins):
        adjust_zero_peak(hist, "interpolate")
