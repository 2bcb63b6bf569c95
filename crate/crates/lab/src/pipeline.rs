//! Orbit-to-record pipeline: single runs, block-count sweeps, and
//! reference-point scans.
//!
//! Every run is deterministic: the orbit is a pure function of the map and
//! the reference point, and all randomness (bootstrap replicates, optimizer
//! restarts) flows from seeds derived by grid index, never by execution
//! order. Sweeps therefore produce identical records at any worker count.
//!
//! Per-run failures (degenerate series, non-converged fits) are recorded in
//! the run's record instead of aborting the sweep; regressions and scan
//! means use only converged fits inside the `n >= 10^3`, `m >= 10^3`
//! window where the asymptotic predictions apply.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use evtlab_core::blockmax::block_extrema;
use evtlab_core::dynsys::MapDef;
use evtlab_core::gev::{self, FitResult};
use evtlab_core::observables::{series_iter, ObservableDef};
use evtlab_core::stats::{self, KsReport, RegressionResult};
use evtlab_core::theory::{self, DensityCase, TheoryPrediction};

use crate::config::{ConfigError, ExperimentConfig, ObsChoice};

/// Fits and regressions are trusted only where both the block count and the
/// block length reach this size.
pub const VALID_WINDOW_MIN: u64 = 1000;

/// Errors that abort a whole pipeline invocation (per-run problems are
/// recorded in the affected record instead).
#[derive(Clone, Debug, PartialEq)]
pub enum PipelineError {
    Config(ConfigError),
    EmptyGrid,
    /// Reference-point scans sweep a scalar and need an interval map.
    ScanNeedsIntervalMap,
    ZeroScanPoints,
    Pool(String),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Config(e) => write!(f, "{e}"),
            PipelineError::EmptyGrid => write!(f, "the block-count grid is empty"),
            PipelineError::ScanNeedsIntervalMap => {
                write!(f, "reference-point scans require a one-dimensional map")
            }
            PipelineError::ZeroScanPoints => write!(f, "scan needs at least one grid point"),
            PipelineError::Pool(msg) => write!(f, "worker pool construction failed: {msg}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<ConfigError> for PipelineError {
    fn from(e: ConfigError) -> Self {
        PipelineError::Config(e)
    }
}

/// Result of one `(n, m)` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub n: u64,
    pub m: u64,
    /// Reference point of this run (scans vary it per record).
    pub zeta: Vec<f64>,
    pub fit: Option<FitResult>,
    pub theory: Option<TheoryPrediction>,
    pub ks: Option<KsReport>,
    /// The fit errored or did not converge; parameters, when present, are
    /// reported anyway.
    pub failed: bool,
    pub error: Option<String>,
    pub wall_secs: f64,
}

/// A record together with the block extrema it was fitted to; the sample
/// feeds histogram reports and is not serialized.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: RunRecord,
    pub sample: Option<Vec<f64>>,
}

/// A named regression of a fitted parameter against the block count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedRegression {
    /// What was regressed on what: `mu_vs_ln_n`, `log10_mu_vs_log10_n`, or
    /// `log10_sigma_vs_log10_n`.
    pub quantity: String,
    pub fit: RegressionResult,
    /// Closed-form slope where the invariant density is known.
    pub predicted_slope: Option<f64>,
}

/// Everything a sweep produces.
#[derive(Clone, Debug, Serialize)]
pub struct SweepOutput {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub regressions: Vec<NamedRegression>,
    #[serde(skip)]
    pub samples: Vec<Option<Vec<f64>>>,
}

/// Everything a reference-point scan produces.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaScanOutput {
    pub config: ExperimentConfig,
    pub n: u64,
    pub m: u64,
    pub records: Vec<RunRecord>,
    pub converged: usize,
    pub mean_xi: Option<f64>,
    pub se_xi: Option<f64>,
    pub mean_sigma: Option<f64>,
    pub se_sigma: Option<f64>,
    pub mean_mu: Option<f64>,
    pub se_mu: Option<f64>,
}

/// Mix a base seed with a grid index (the 64-bit finalizer of the splitmix
/// generator), so replicate streams differ across runs but never depend on
/// scheduling.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn failed_record(n: u64, m: u64, obs: &ObservableDef, message: String, start: Instant) -> RunOutput {
    RunOutput {
        record: RunRecord {
            n,
            m,
            zeta: obs.zeta().coords().to_vec(),
            fit: None,
            theory: None,
            ks: None,
            failed: true,
            error: Some(message),
            wall_secs: start.elapsed().as_secs_f64(),
        },
        sample: None,
    }
}

/// One run: orbit, block extrema, fit, prediction, bootstrap test.
fn execute(
    map: &MapDef,
    obs: &ObservableDef,
    case: Option<DensityCase>,
    n: u64,
    m: u64,
    ks_replicates: u32,
    seed: u64,
) -> RunOutput {
    let start = Instant::now();
    if m == 0 {
        return failed_record(n, m, obs, "block length is zero (n exceeds k)".into(), start);
    }
    let len = match usize::try_from(n * m) {
        Ok(v) => v,
        Err(_) => return failed_record(n, m, obs, "series length overflows usize".into(), start),
    };
    let series = match series_iter(map, obs, len) {
        Ok(s) => s,
        Err(e) => return failed_record(n, m, obs, e.to_string(), start),
    };
    let sample = match block_extrema(series, n as usize, obs.extremum_mode()) {
        Ok(s) => s.values,
        Err(e) => return failed_record(n, m, obs, e.to_string(), start),
    };
    let theory = case.and_then(|c| theory::predict(obs, c, m).ok());
    let (fit, error) = match gev::fit_mle(&sample) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ks = match &fit {
        Some(f) if f.converged && ks_replicates > 0 => {
            stats::ks_test_bootstrap(&sample, &f.params, ks_replicates, seed).ok()
        }
        _ => None,
    };
    let failed = fit.as_ref().map_or(true, |f| !f.converged);
    RunOutput {
        record: RunRecord {
            n,
            m,
            zeta: obs.zeta().coords().to_vec(),
            fit,
            theory,
            ks,
            failed,
            error,
            wall_secs: start.elapsed().as_secs_f64(),
        },
        sample: Some(sample),
    }
}

/// Run one `(n, m = floor(k/n))` experiment from a validated configuration.
pub fn run_single(cfg: &ExperimentConfig, n: u64) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    if n == 0 || n > cfg.k {
        return Err(PipelineError::Config(ConfigError::Invalid(format!(
            "block count {n} must lie in [1, k = {}]",
            cfg.k
        ))));
    }
    let map = cfg.build_map()?;
    let obs = cfg.build_observable()?;
    let case = cfg.density_case();
    let m = cfg.k / n;
    Ok(execute(&map, &obs, case, n, m, cfg.ks_replicates, derive_seed(cfg.seed, 0)))
}

fn with_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, PipelineError> {
    if workers == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Records inside the trusted window whose fit converged.
fn valid_fits(records: &[RunRecord]) -> impl Iterator<Item = (&RunRecord, &FitResult)> {
    records.iter().filter_map(|r| match &r.fit {
        Some(f) if f.converged && r.n >= VALID_WINDOW_MIN && r.m >= VALID_WINDOW_MIN => {
            Some((r, f))
        }
        _ => None,
    })
}

fn regress(
    quantity: &str,
    points: &[(f64, f64)],
    predicted_slope: Option<f64>,
) -> Option<NamedRegression> {
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = stats::linfit(&x, &y).ok()?;
    Some(NamedRegression { quantity: quantity.into(), fit, predicted_slope })
}

/// Parameter-versus-`n` regressions over the valid window: location against
/// `ln n` for the logarithmic observable, both `log10` parameters against
/// `log10 n` for the power-law ones.
fn sweep_regressions(observable: ObsChoice, records: &[RunRecord]) -> Vec<NamedRegression> {
    let theory = records.iter().find_map(|r| r.theory.as_ref());
    let mut out = Vec::new();
    match observable {
        ObsChoice::G1 => {
            let pts: Vec<(f64, f64)> = valid_fits(records)
                .map(|(r, f)| ((r.n as f64).ln(), f.params.mu()))
                .collect();
            out.extend(regress(
                "mu_vs_ln_n",
                &pts,
                theory.and_then(|t| t.slope_mu_vs_ln_n),
            ));
        }
        ObsChoice::G2 | ObsChoice::G3 => {
            let mu_pts: Vec<(f64, f64)> = valid_fits(records)
                .filter(|(_, f)| f.params.mu() > 0.0)
                .map(|(r, f)| ((r.n as f64).log10(), f.params.mu().log10()))
                .collect();
            out.extend(regress(
                "log10_mu_vs_log10_n",
                &mu_pts,
                theory.and_then(|t| t.slope_log_mu_vs_log_n),
            ));
            let sigma_pts: Vec<(f64, f64)> = valid_fits(records)
                .map(|(r, f)| ((r.n as f64).log10(), f.params.sigma().log10()))
                .collect();
            out.extend(regress(
                "log10_sigma_vs_log10_n",
                &sigma_pts,
                theory.and_then(|t| t.slope_log_sigma_vs_log_n),
            ));
        }
        ObsChoice::MinDistance => {}
    }
    out
}

/// Sweep the block-count grid, one run per entry, in grid order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, PipelineError> {
    cfg.validate()?;
    if cfg.n_grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    let map = cfg.build_map()?;
    let obs = cfg.build_observable()?;
    let case = cfg.density_case();
    let outputs: Vec<RunOutput> = with_pool(cfg.workers, || {
        cfg.n_grid
            .par_iter()
            .enumerate()
            .map(|(i, &n)| {
                let m = cfg.k / n;
                execute(&map, &obs, case, n, m, cfg.ks_replicates, derive_seed(cfg.seed, i as u64))
            })
            .collect()
    })?;
    let mut records = Vec::with_capacity(outputs.len());
    let mut samples = Vec::with_capacity(outputs.len());
    for o in outputs {
        records.push(o.record);
        samples.push(o.sample);
    }
    let regressions = sweep_regressions(cfg.observable, &records);
    Ok(SweepOutput { config: cfg.clone(), records, regressions, samples })
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

/// Scan the reference point over `points` equispaced interior values
/// `zeta_j = (j + 1/2)/points`, at fixed `n = n_grid[0]` and `m = k/n`.
/// Grand means cover converged fits only.
pub fn run_zeta_scan(cfg: &ExperimentConfig, points: usize) -> Result<ZetaScanOutput, PipelineError> {
    cfg.validate()?;
    if points == 0 {
        return Err(PipelineError::ZeroScanPoints);
    }
    if cfg.map.dimension() != 1 {
        return Err(PipelineError::ScanNeedsIntervalMap);
    }
    let map = cfg.build_map()?;
    let case = cfg.density_case();
    let n = cfg.n_grid[0];
    let m = cfg.k / n;
    // pre-build one observable per grid point so errors surface before work
    let mut observables = Vec::with_capacity(points);
    for j in 0..points {
        let zeta = (j as f64 + 0.5) / points as f64;
        let per_point =
            ExperimentConfig { zeta: Some(vec![zeta]), ..cfg.clone() };
        observables.push(per_point.build_observable()?);
    }
    let outputs: Vec<RunOutput> = with_pool(cfg.workers, || {
        observables
            .par_iter()
            .enumerate()
            .map(|(j, obs)| {
                execute(&map, obs, case, n, m, cfg.ks_replicates, derive_seed(cfg.seed, j as u64))
            })
            .collect()
    })?;
    let records: Vec<RunRecord> = outputs.into_iter().map(|o| o.record).collect();
    let fits: Vec<&FitResult> = records
        .iter()
        .filter_map(|r| r.fit.as_ref().filter(|f| f.converged))
        .collect();
    let xi: Vec<f64> = fits.iter().map(|f| f.params.xi()).collect();
    let sigma: Vec<f64> = fits.iter().map(|f| f.params.sigma()).collect();
    let mu: Vec<f64> = fits.iter().map(|f| f.params.mu()).collect();
    let (mean_xi, se_xi) = mean_and_se(&xi);
    let (mean_sigma, se_sigma) = mean_and_se(&sigma);
    let (mean_mu, se_mu) = mean_and_se(&mu);
    Ok(ZetaScanOutput {
        config: cfg.clone(),
        n,
        m,
        converged: fits.len(),
        records,
        mean_xi,
        se_xi,
        mean_sigma,
        se_sigma,
        mean_mu,
        se_mu,
    })
}
