//! Goodness-of-fit and regression utilities for the extreme-value pipeline:
//! the two-sided Kolmogorov-Smirnov statistic with a parametric bootstrap
//! (the fitted-parameter, refit-per-replicate scheme), ordinary
//! least-squares slope extraction for the log-scale parameter series, and
//! fixed-range histograms with a prominence-based mode counter.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // as a trait import: std builds resolve these methods inherently
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gev::{self, GevParams};

/// Errors from the statistics helpers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsError {
    EmptyData,
    NonFiniteData,
    ZeroReplicates,
    MismatchedLengths { x: usize, y: usize },
    TooFewPoints { needed: usize, got: usize },
    /// All abscissae equal; no slope is identifiable.
    ZeroVariance,
    InvalidBins,
    InvalidRange,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::EmptyData => write!(f, "data must be non-empty"),
            StatsError::NonFiniteData => write!(f, "data must be finite"),
            StatsError::ZeroReplicates => write!(f, "bootstrap needs at least one replicate"),
            StatsError::MismatchedLengths { x, y } => {
                write!(f, "mismatched series lengths: {x} vs {y}")
            }
            StatsError::TooFewPoints { needed, got } => {
                write!(f, "need at least {needed} points, got {got}")
            }
            StatsError::ZeroVariance => write!(f, "abscissae have zero variance"),
            StatsError::InvalidBins => write!(f, "bin count must be positive"),
            StatsError::InvalidRange => write!(f, "range must be finite with lo < hi"),
        }
    }
}

impl core::error::Error for StatsError {}

/// Two-sided Kolmogorov-Smirnov statistic of `data` against the
/// distribution function `cdf`:
/// `D = max_i max(i/N - F(x_(i)), F(x_(i)) - (i-1)/N)` over the order
/// statistics `x_(i)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<f64, StatsError> {
    if data.is_empty() {
        return Err(StatsError::EmptyData);
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteData);
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper.abs()).max(lower.abs());
    }
    Ok(d)
}

/// Bootstrap goodness-of-fit report.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsReport {
    /// Observed statistic against the fitted distribution.
    pub statistic: f64,
    /// `(r + 1)/(R + 1)` where `r` counts replicate statistics at or above
    /// the observed one.
    pub p_value: f64,
    pub replicates: u32,
    /// Rejection of the fitted family at the 5% level.
    pub reject: bool,
}

/// Statistic of one bootstrap replicate: draw a synthetic sample of size
/// `n` from `params`, refit it, and measure the sample against its own
/// refit (falling back to `params` when the refit fails). Replicates are
/// indexed through independent generator streams of a single seed, so any
/// execution order reproduces the same set of statistics.
pub fn ks_replicate_statistic(n: usize, params: &GevParams, seed: u64, replicate: u32) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(replicate) + 1);
    let synthetic = params.sample_with(&mut rng, n);
    let reference = match gev::fit_mle(&synthetic) {
        Ok(fit) => fit.params,
        Err(_) => *params,
    };
    // synthetic data are finite by construction
    ks_statistic(&synthetic, |x| reference.cdf(x)).unwrap_or(f64::INFINITY)
}

/// Parametric bootstrap Kolmogorov-Smirnov test of `data` against the
/// fitted `params`, with per-replicate refitting so the null distribution
/// accounts for the estimation step.
pub fn ks_test_bootstrap(
    data: &[f64],
    params: &GevParams,
    replicates: u32,
    seed: u64,
) -> Result<KsReport, StatsError> {
    if replicates == 0 {
        return Err(StatsError::ZeroReplicates);
    }
    let statistic = ks_statistic(data, |x| params.cdf(x))?;
    let mut exceed = 0u32;
    for r in 0..replicates {
        if ks_replicate_statistic(data.len(), params, seed, r) >= statistic {
            exceed += 1;
        }
    }
    let p_value = (f64::from(exceed) + 1.0) / (f64::from(replicates) + 1.0);
    Ok(KsReport { statistic, p_value, replicates, reject: p_value < 0.05 })
}

/// Ordinary least-squares line fit.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope, `sqrt(s^2 / Sxx)` with the residual
    /// variance on `n - 2` degrees of freedom.
    pub slope_stderr: f64,
    /// Coefficient of determination, clamped to `[0,1]`; an all-equal
    /// response counts as perfectly explained.
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares regression of `y` on `x`.
pub fn linfit(x: &[f64], y: &[f64]) -> Result<RegressionResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::MismatchedLengths { x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPoints { needed: 3, got: x.len() });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteData);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    let s2 = ssr / (n - 2.0);
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ssr / syy).clamp(0.0, 1.0) };
    Ok(RegressionResult {
        slope,
        intercept,
        slope_stderr: (s2 / sxx).sqrt(),
        r_squared,
        n_points: x.len(),
    })
}

/// Fixed-range histogram with uniform bins; the rightmost bin is closed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    /// Left edge of bin `b`.
    pub fn left_edge(&self, b: usize) -> f64 {
        self.lo + b as f64 * self.bin_width()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Bin `data` into `bins` uniform cells over `[lo, hi]`. Bins are
/// half-open `[a, b)` except the last, which is `[a, hi]`; values outside
/// the range (NaN included) are dropped.
pub fn histogram(data: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram, StatsError> {
    if bins == 0 {
        return Err(StatsError::InvalidBins);
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(StatsError::InvalidRange);
    }
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for &v in data {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram { lo, hi, counts })
}

/// Count the prominent modes of a histogram. A mode is a plateau-merged
/// local maximum holding at least half a percent of the sample (and never
/// fewer than three counts); adjacent maxima collapse into one mode unless
/// the valley between them drops to 75% of the lower summit or below.
/// Uniformly low histograms report zero modes.
pub fn count_modes(counts: &[u64]) -> usize {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0;
    }
    let floor = (total / 200).max(3);
    let n = counts.len();

    let mut peaks: Vec<(usize, u64)> = Vec::new();
    let mut i = 0;
    while i < n {
        let h = counts[i];
        let mut j = i;
        while j + 1 < n && counts[j + 1] == h {
            j += 1;
        }
        let left_lower = i == 0 || counts[i - 1] < h;
        let right_lower = j + 1 == n || counts[j + 1] < h;
        if h >= floor && left_lower && right_lower {
            peaks.push(((i + j) / 2, h));
        }
        i = j + 1;
    }
    if peaks.is_empty() {
        return 0;
    }

    let mut modes = 1usize;
    let (mut prev_idx, mut prev_h) = peaks[0];
    for &(idx, h) in &peaks[1..] {
        let valley = counts[prev_idx..=idx].iter().copied().min().unwrap_or(0);
        if (valley as f64) <= 0.75 * prev_h.min(h) as f64 {
            modes += 1;
            prev_h = h;
        } else {
            prev_h = prev_h.max(h);
        }
        prev_idx = idx;
    }
    modes
}
