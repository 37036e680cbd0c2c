"""Lag-distribution statistics: histograms, shifted log-normal fits, Welch tests.

Histograms use 2-month bins aligned so that one bin is centered at zero lag.
Fits target the binned line shape: bin contents are matched to the exact
integral of a 3-parameter (shifted) log-normal density over each bin by
weighted nonlinear least squares. Welch's t-test runs on the full samples,
on log-shifted samples, and on repeated small subsamples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy import stats as sps

from .errors import (
    DegenerateSample,
    EmptySample,
    FitDiverged,
    InsufficientData,
    MissingBins,
    SampleTooSmall,
)

_MAX_FIT_ITER = 500


@dataclass
class LagHistogram:
    """Fixed-width lag bins; ``centers[k]`` is the midpoint of bin k.

    Bin k covers [center - width/2, center + width/2); with the default
    width of 2 months one bin is centered exactly at zero. After a zero-peak
    removal the center grid keeps its alignment but may have a hole.
    """

    bin_width: float
    centers: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        total = self.total
        return self.counts / total if total else self.counts.astype(float)

    def index_of_center(self, center: float) -> int | None:
        hits = np.nonzero(np.isclose(self.centers, center))[0]
        return int(hits[0]) if len(hits) else None


def bin_index(lag: float, bin_width: float) -> int:
    """Index of the bin containing ``lag``: bin k is [k*w - w/2, k*w + w/2)."""
    return math.floor((lag + bin_width / 2.0) / bin_width)


def histogram(lags, bin_width: float = 2.0) -> LagHistogram:
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    lags = np.asarray(lags, dtype=float)
    if len(lags) == 0:
        return LagHistogram(bin_width, np.array([]), np.array([], dtype=np.int64))
    idx = np.floor((lags + bin_width / 2.0) / bin_width).astype(np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    centers = np.arange(lo, hi + 1) * bin_width
    return LagHistogram(bin_width, centers, counts)


def write_histogram_csv(path, hist: LagHistogram) -> None:
    probs = hist.probabilities()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["bin_center", "count", "probability"])
        for center, count, prob in zip(hist.centers, hist.counts, probs):
            writer.writerow([repr(float(center)), int(count), repr(float(prob))])


@dataclass
class SummaryStats:
    mean: float
    median: float
    mode: float
    mean_se: float | None = None
    median_se: float | None = None
    mode_se: float | None = None

    def as_dict(self) -> dict:
        out = {"mean": self.mean, "median": self.median, "mode": self.mode}
        if self.mean_se is not None:
            out.update({"mean_se": self.mean_se, "median_se": self.median_se,
                        "mode_se": self.mode_se})
        return out


def raw_summary(lags, bin_width: float = 2.0) -> SummaryStats:
    """Empirical mean, median of integer-rounded lags, and modal bin center.

    The mode is the center of the highest-count bin, lowest bin on ties,
    using the same even-centered alignment as the histograms.
    """
    lags = np.asarray(lags, dtype=float)
    if len(lags) == 0:
        raise EmptySample("raw_summary of an empty sample")
    mean = float(lags.mean())
    rounded = np.floor(lags + 0.5)  # round half up, months
    median = float(np.median(rounded))
    hist = histogram(lags, bin_width)
    mode = float(hist.centers[int(np.argmax(hist.counts))])
    return SummaryStats(mean, median, mode)


def _shifted_lognormal_bin_prob(edges_lo, edges_hi, shift, mu, sigma):
    """Exact probability mass of the shifted log-normal over [lo, hi) bins."""

    def cdf(x):
        z = np.asarray(x, dtype=float) - shift
        out = np.zeros_like(z)
        pos = z > 0
        out[pos] = sps.norm.cdf((np.log(z[pos]) - mu) / sigma)
        return out

    return cdf(edges_hi) - cdf(edges_lo)


@dataclass
class LogNormalFit:
    """3-parameter shifted log-normal fitted to a binned line shape.

    The distribution is shift + X with ln X ~ Normal(mu, sigma^2). Derived
    statistics: mode = shift + e^(mu - sigma^2) <= median = shift + e^mu
    <= mean = shift + e^(mu + sigma^2 / 2).
    """

    shift: float
    mu: float
    sigma: float
    shift_se: float
    mu_se: float
    sigma_se: float
    ssr: float
    n_bins: int
    excluded_zero_bin: bool = False

    def derived_stats(self) -> SummaryStats:
        g, mu, s = self.shift, self.mu, self.sigma
        mean = g + math.exp(mu + s * s / 2.0)
        median = g + math.exp(mu)
        mode = g + math.exp(mu - s * s)
        cov = getattr(self, "_cov", None)
        ses = {}
        if cov is not None:
            grads = {
                "mean": np.array([1.0, math.exp(mu + s * s / 2.0), s * math.exp(mu + s * s / 2.0)]),
                "median": np.array([1.0, math.exp(mu), 0.0]),
                "mode": np.array([1.0, math.exp(mu - s * s), -2.0 * s * math.exp(mu - s * s)]),
            }
            for name, grad in grads.items():
                var = float(grad @ cov @ grad)
                ses[name] = math.sqrt(var) if var > 0 else 0.0
        return SummaryStats(
            mean, median, mode,
            mean_se=ses.get("mean"), median_se=ses.get("median"), mode_se=ses.get("mode"),
        )

    def as_dict(self) -> dict:
        return {
            "shift": self.shift, "mu": self.mu, "sigma": self.sigma,
            "shift_se": self.shift_se, "mu_se": self.mu_se, "sigma_se": self.sigma_se,
            "ssr": self.ssr, "n_bins": self.n_bins,
            "excluded_zero_bin": self.excluded_zero_bin,
            "derived": self.derived_stats().as_dict(),
        }


def fit_lognormal(hist: LagHistogram, exclude_zero_bin: bool = False) -> LogNormalFit:
    """Weighted least-squares fit of the binned line shape.

    Each residual compares the observed bin count against the density
    integrated over the bin, scaled by the model-expected Poisson noise
    (Pearson weighting), which keeps the parameter standard errors honest
    for multinomial histogram data. ``exclude_zero_bin`` drops the bin
    centered at 0 from the residuals (used for self-citation distributions
    whose zero peak the smooth shape cannot carry). Standard errors come
    from the residual-based covariance, inflated by the reduced chi-square
    when the shape misfits.
    """
    centers = hist.centers.astype(float)
    counts = hist.counts.astype(float)
    if exclude_zero_bin:
        keep = ~np.isclose(centers, 0.0)
        centers, counts = centers[keep], counts[keep]
    populated = int((counts > 0).sum())
    if populated < 6:
        raise InsufficientData(f"only {populated} populated bins; need at least 6")
    half = hist.bin_width / 2.0
    lo = centers - half
    hi = centers + half
    total = counts.sum()

    support_min = float(lo[counts > 0].min())
    shift0 = support_min - 1.0
    weights = counts / total
    logged = np.log(centers - shift0)
    mu0 = float(np.sum(weights * logged))
    sigma0 = float(math.sqrt(max(np.sum(weights * (logged - mu0) ** 2), 1e-4)))

    def residuals(theta):
        shift, mu, sigma = theta
        expected = total * _shifted_lognormal_bin_prob(lo, hi, shift, mu, sigma)
        return (expected - counts) / np.sqrt(np.maximum(expected, 1.0))

    result = optimize.least_squares(
        residuals,
        x0=np.array([shift0, mu0, sigma0]),
        bounds=([-np.inf, -np.inf, 1e-9], [support_min, np.inf, np.inf]),
        method="trf",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=_MAX_FIT_ITER * 3,
    )
    if not result.success or not np.all(np.isfinite(result.x)):
        raise FitDiverged(f"least squares failed: {result.message}")
    shift, mu, sigma = (float(v) for v in result.x)
    ssr = float(np.sum(result.fun**2))
    dof = max(len(centers) - 3, 1)
    jac = result.jac
    try:
        cov = np.linalg.inv(jac.T @ jac) * max(ssr / dof, 1.0)
        ses = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        cov = None
        ses = np.full(3, math.nan)
    fit = LogNormalFit(
        shift, mu, sigma,
        float(ses[0]), float(ses[1]), float(ses[2]),
        ssr, len(centers), exclude_zero_bin,
    )
    fit._cov = cov
    return fit


@dataclass
class WelchResult:
    t: float
    df: float
    p_value: float
    shift_constant: float | None = None

    def as_dict(self) -> dict:
        out = {"t": self.t, "df": self.df, "p_value": self.p_value}
        if self.shift_constant is not None:
            out["shift_constant"] = self.shift_constant
        return out


def welch_t(a, b) -> WelchResult:
    """Welch's unequal-variance t-test with Welch-Satterthwaite df.

    Two-sided p-value from the Student-t distribution. Raises
    DegenerateSample when both samples have zero variance.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise EmptySample("welch_t needs at least 2 observations per sample")
    va = float(a.var(ddof=1))
    vb = float(b.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        raise DegenerateSample("both samples have zero variance")
    sa = va / len(a)
    sb = vb / len(b)
    t = (float(a.mean()) - float(b.mean())) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (len(a) - 1) + sb**2 / (len(b) - 1))
    p = 2.0 * float(sps.t.sf(abs(t), df))
    return WelchResult(t, df, p)


def log_shift_welch(a, b) -> WelchResult:
    """Welch test on ln(x + c) with c = 1 - min of both samples pooled."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("log_shift_welch on an empty sample")
    c = 1.0 - min(float(a.min()), float(b.min()))
    result = welch_t(np.log(a + c), np.log(b + c))
    result.shift_constant = c
    return result


@dataclass
class SubsampleResult:
    mean_t: float
    significant_fraction: float
    k: int
    reps: int
    alpha: float

    def as_dict(self) -> dict:
        return {
            "mean_t": self.mean_t,
            "significant_fraction": self.significant_fraction,
            "k": self.k,
            "reps": self.reps,
            "alpha": self.alpha,
        }


def subsample_welch(a, b, k: int = 300, reps: int = 500, alpha: float = 0.05,
                    seed: int = 0) -> SubsampleResult:
    """Welch tests on repeated size-k subsamples drawn without replacement.

    Repetition r uses its own generator seeded with ``seed + r``, so the
    repetitions are independent and the whole sweep is reproducible (and
    parallelizable) for a fixed master seed.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < k or len(b) < k:
        raise SampleTooSmall(f"need at least k={k} observations in each sample")
    ts = np.empty(reps)
    significant = 0
    for r in range(reps):
        rng = np.random.default_rng(seed + r)
        sub_a = a[rng.choice(len(a), size=k, replace=False)]
        sub_b = b[rng.choice(len(b), size=k, replace=False)]
        result = welch_t(sub_a, sub_b)
        ts[r] = result.t
        if result.p_value < alpha:
            significant += 1
    return SubsampleResult(float(ts.mean()), significant / reps, k, reps, alpha)


def adjust_zero_peak(hist: LagHistogram, mode: str) -> LagHistogram:
    """Replace or drop the zero-lag bin of a histogram.

    ``mode="interpolate"`` sets the 0-bin count to the average of the
    counts in the bins centered at +/- one bin width (rounded to the
    nearest integer); ``mode="remove"`` deletes the 0-bin outright. The
    total is recomputed either way.
    """
    if mode not in ("interpolate", "remove"):
        raise ValueError(f"unknown zero-peak mode {mode!r}")
    zero = hist.index_of_center(0.0)
    if zero is None:
        raise MissingBins("histogram has no bin centered at 0")
    if mode == "remove":
        keep = np.ones(len(hist.centers), dtype=bool)
        keep[zero] = False
        return LagHistogram(hist.bin_width, hist.centers[keep], hist.counts[keep])
    left = hist.index_of_center(-hist.bin_width)
    right = hist.index_of_center(hist.bin_width)
    if left is None or right is None:
        raise MissingBins("histogram lacks the bins flanking 0")
    counts = hist.counts.copy()
    counts[zero] = int(math.floor((counts[left] + counts[right]) / 2.0 + 0.5))
    return LagHistogram(hist.bin_width, hist.centers.copy(), counts)
