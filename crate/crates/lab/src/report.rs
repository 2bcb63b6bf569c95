//! File emission: CSV tables, plot data, histogram data, and JSON records.
//!
//! Result CSVs are pure functions of the records, so identical
//! configurations and seeds reproduce them byte for byte; wall-clock times
//! and timestamps are confined to the JSON documents. Missing values are
//! written as the literal token `NA` and every row carries the full column
//! set of its header.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use evtlab_core::stats;

use crate::config::ExperimentConfig;
use crate::pipeline::{RunRecord, SweepOutput, ZetaScanOutput};

/// Missing-value token used throughout the CSV outputs.
pub const NA: &str = "NA";

/// Bin count for the emitted histograms.
pub const HIST_BINS: usize = 60;

/// Errors from writing report files.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportError {
    Io { path: String, message: String },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Io { path, message } => write!(f, "cannot write {path}: {message}"),
        }
    }
}

impl std::error::Error for ReportError {}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    std::fs::write(path, contents).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn ensure_dir(dir: &Path) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir).map_err(|e| ReportError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })
}

/// Shortest round-trip decimal for a finite value, `inf`/`-inf` for
/// unbounded interval ends, `NA` for undefined.
fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        NA.into()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.into(), fmt_f)
}

fn fmt_bool(v: Option<bool>) -> String {
    v.map_or_else(|| NA.into(), |b| b.to_string())
}

/// Keep free-text CSV-safe: commas and line breaks become spaces.
fn csv_token(s: &str) -> String {
    s.replace([',', '\n', '\r'], " ")
}

fn zeta_token(zeta: &[f64]) -> String {
    zeta.iter().map(|z| format!("{z}")).collect::<Vec<_>>().join(";")
}

fn map_param_token(cfg: &ExperimentConfig) -> String {
    fmt_opt(cfg.map_param.or_else(|| cfg.map.default_param()))
}

const RUN_COLUMNS: &str = "map,map_param,observable,alpha,cap,zeta,seed,k,n,m,converged,\
mu,mu_lo,mu_hi,sigma,sigma_lo,sigma_hi,xi,xi_lo,xi_hi,loglik,n_data,\
theory_a_m,theory_b_m,theory_mu,theory_sigma,theory_xi,\
ks_d,ks_p,ks_reject,ks_replicates,failed,error";

fn push_run_row(out: &mut String, cfg: &ExperimentConfig, r: &RunRecord) {
    let fit = r.fit.as_ref();
    let th = r.theory.as_ref();
    let ks = r.ks.as_ref();
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cfg.map,
        map_param_token(cfg),
        cfg.observable,
        fmt_f(cfg.alpha),
        fmt_f(cfg.cap),
        zeta_token(&r.zeta),
        cfg.seed,
        cfg.k,
        r.n,
        r.m,
        fmt_bool(fit.map(|f| f.converged)),
        fmt_opt(fit.map(|f| f.params.mu())),
        fmt_opt(fit.map(|f| f.mu_ci.lo)),
        fmt_opt(fit.map(|f| f.mu_ci.hi)),
        fmt_opt(fit.map(|f| f.params.sigma())),
        fmt_opt(fit.map(|f| f.sigma_ci.lo)),
        fmt_opt(fit.map(|f| f.sigma_ci.hi)),
        fmt_opt(fit.map(|f| f.params.xi())),
        fmt_opt(fit.map(|f| f.xi_ci.lo)),
        fmt_opt(fit.map(|f| f.xi_ci.hi)),
        fmt_opt(fit.map(|f| f.loglik)),
        fit.map_or_else(|| NA.into(), |f| f.n_data.to_string()),
        fmt_opt(th.map(|t| t.a_m)),
        fmt_opt(th.map(|t| t.b_m)),
        fmt_opt(th.map(|t| t.mu_pred)),
        fmt_opt(th.map(|t| t.sigma_pred)),
        fmt_opt(th.map(|t| t.xi_pred)),
        fmt_opt(ks.map(|k| k.statistic)),
        fmt_opt(ks.map(|k| k.p_value)),
        fmt_bool(ks.map(|k| k.reject)),
        ks.map_or_else(|| NA.into(), |k| k.replicates.to_string()),
        r.failed,
        r.error.as_deref().map_or_else(|| NA.into(), csv_token),
    );
}

fn runs_csv(cfg: &ExperimentConfig, records: &[RunRecord]) -> String {
    let mut out = String::from(RUN_COLUMNS);
    out.push('\n');
    for r in records {
        push_run_row(&mut out, cfg, r);
    }
    out
}

fn summary_csv(output: &SweepOutput) -> String {
    let mut out = String::from(
        "quantity,slope,slope_stderr,intercept,r_squared,points,\
predicted_slope,abs_slope,abs_predicted_slope,abs_deviation\n",
    );
    for reg in &output.regressions {
        let abs_slope = reg.fit.slope.abs();
        let abs_pred = reg.predicted_slope.map(f64::abs);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            reg.quantity,
            fmt_f(reg.fit.slope),
            fmt_f(reg.fit.slope_stderr),
            fmt_f(reg.fit.intercept),
            fmt_f(reg.fit.r_squared),
            reg.fit.n_points,
            fmt_opt(reg.predicted_slope),
            fmt_f(abs_slope),
            fmt_opt(abs_pred),
            fmt_opt(abs_pred.map(|p| (abs_slope - p).abs())),
        );
    }
    out
}

/// One plot table per fitted parameter: the value with its interval against
/// `n`, next to the closed-form prediction where one exists.
fn plot_csv(records: &[RunRecord], which: Plot) -> String {
    let mut out = String::from("n,value,lo,hi,predicted\n");
    for r in records {
        let fit = r.fit.as_ref();
        let (value, lo, hi) = match which {
            Plot::Mu => (
                fit.map(|f| f.params.mu()),
                fit.map(|f| f.mu_ci.lo),
                fit.map(|f| f.mu_ci.hi),
            ),
            Plot::Sigma => (
                fit.map(|f| f.params.sigma()),
                fit.map(|f| f.sigma_ci.lo),
                fit.map(|f| f.sigma_ci.hi),
            ),
            Plot::Xi => (
                fit.map(|f| f.params.xi()),
                fit.map(|f| f.xi_ci.lo),
                fit.map(|f| f.xi_ci.hi),
            ),
        };
        let predicted = r.theory.as_ref().map(|t| match which {
            Plot::Mu => t.mu_pred,
            Plot::Sigma => t.sigma_pred,
            Plot::Xi => t.xi_pred,
        });
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_opt(value),
            fmt_opt(lo),
            fmt_opt(hi),
            fmt_opt(predicted),
        );
    }
    out
}

#[derive(Clone, Copy)]
enum Plot {
    Mu,
    Sigma,
    Xi,
}

/// Histogram CSV over the sample range; `None` when the sample is too
/// degenerate to bin.
fn histogram_csv(sample: &[f64]) -> Option<String> {
    let lo = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    let h = stats::histogram(sample, HIST_BINS, lo, hi).ok()?;
    let mut out = String::from("bin_left,bin_right,count\n");
    for (b, &c) in h.counts().iter().enumerate() {
        let left = h.left_edge(b);
        let right = if b + 1 == h.counts().len() { h.hi() } else { h.left_edge(b + 1) };
        let _ = writeln!(out, "{},{},{c}", fmt_f(left), fmt_f(right));
    }
    Some(out)
}

fn meta_json(cfg: &ExperimentConfig, total_wall_secs: f64) -> String {
    let created_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "tool": "evtlab",
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": created_unix,
        "total_wall_secs": total_wall_secs,
        "workers": cfg.workers,
        "config": cfg,
        "conventions": {
            "ball_volume": "unit-ball constant 2 on the interval, pi on the torus, wrapped Euclidean metric",
            "confidence_intervals": "95% Wald intervals from the observed-information matrix at the optimum",
            "goodness_of_fit": "parametric bootstrap with per-replicate refitting; p = (r+1)/(R+1), reject below 0.05",
            "valid_window": "regressions and scan means use converged fits with n >= 1000 and m >= 1000",
            "block_layout": "m = floor(k/n); the series is truncated to n*m values",
        },
    });
    serde_json::to_string_pretty(&meta).expect("meta serialization cannot fail")
}

/// Write every sweep artifact into `dir`.
///
/// Files: `runs.csv`, `summary.csv`, `plot_mu.csv`, `plot_sigma.csv`,
/// `plot_xi.csv`, `records.json`, `meta.json`, and, for maps without a
/// closed-form invariant density, per-run `hist_linear_n*.csv` and
/// `hist_log10_n*.csv` over the block extrema.
pub fn write_sweep(dir: &Path, output: &SweepOutput) -> Result<(), ReportError> {
    ensure_dir(dir)?;
    let cfg = &output.config;
    write_file(&dir.join("runs.csv"), &runs_csv(cfg, &output.records))?;
    write_file(&dir.join("summary.csv"), &summary_csv(output))?;
    write_file(&dir.join("plot_mu.csv"), &plot_csv(&output.records, Plot::Mu))?;
    write_file(&dir.join("plot_sigma.csv"), &plot_csv(&output.records, Plot::Sigma))?;
    write_file(&dir.join("plot_xi.csv"), &plot_csv(&output.records, Plot::Xi))?;
    if cfg.density_case().is_none() {
        for (r, sample) in output.records.iter().zip(&output.samples) {
            let Some(sample) = sample else { continue };
            if let Some(csv) = histogram_csv(sample) {
                write_file(&dir.join(format!("hist_linear_n{}.csv", r.n)), &csv)?;
            }
            let logs: Vec<f64> =
                sample.iter().filter(|&&v| v > 0.0).map(|v| v.log10()).collect();
            if let Some(csv) = histogram_csv(&logs) {
                write_file(&dir.join(format!("hist_log10_n{}.csv", r.n)), &csv)?;
            }
        }
    }
    let records = serde_json::to_string_pretty(output).expect("record serialization cannot fail");
    write_file(&dir.join("records.json"), &records)?;
    let total: f64 = output.records.iter().map(|r| r.wall_secs).sum();
    write_file(&dir.join("meta.json"), &meta_json(cfg, total))
}

const ZETA_RUN_COLUMNS: &str = "zeta,n,m,converged,mu,mu_lo,mu_hi,sigma,sigma_lo,sigma_hi,\
xi,xi_lo,xi_hi,loglik,theory_mu,theory_sigma,theory_xi,ks_d,ks_p,ks_reject,failed,error";

fn zeta_runs_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(ZETA_RUN_COLUMNS);
    out.push('\n');
    for r in records {
        let fit = r.fit.as_ref();
        let th = r.theory.as_ref();
        let ks = r.ks.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            zeta_token(&r.zeta),
            r.n,
            r.m,
            fmt_bool(fit.map(|f| f.converged)),
            fmt_opt(fit.map(|f| f.params.mu())),
            fmt_opt(fit.map(|f| f.mu_ci.lo)),
            fmt_opt(fit.map(|f| f.mu_ci.hi)),
            fmt_opt(fit.map(|f| f.params.sigma())),
            fmt_opt(fit.map(|f| f.sigma_ci.lo)),
            fmt_opt(fit.map(|f| f.sigma_ci.hi)),
            fmt_opt(fit.map(|f| f.params.xi())),
            fmt_opt(fit.map(|f| f.xi_ci.lo)),
            fmt_opt(fit.map(|f| f.xi_ci.hi)),
            fmt_opt(fit.map(|f| f.loglik)),
            fmt_opt(th.map(|t| t.mu_pred)),
            fmt_opt(th.map(|t| t.sigma_pred)),
            fmt_opt(th.map(|t| t.xi_pred)),
            fmt_opt(ks.map(|k| k.statistic)),
            fmt_opt(ks.map(|k| k.p_value)),
            fmt_bool(ks.map(|k| k.reject)),
            r.failed,
            r.error.as_deref().map_or_else(|| NA.into(), csv_token),
        );
    }
    out
}

fn zeta_summary_csv(output: &ZetaScanOutput) -> String {
    let mut out = String::from(
        "points,converged,mean_xi,se_xi,mean_sigma,se_sigma,mean_mu,se_mu\n",
    );
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        output.records.len(),
        output.converged,
        fmt_opt(output.mean_xi),
        fmt_opt(output.se_xi),
        fmt_opt(output.mean_sigma),
        fmt_opt(output.se_sigma),
        fmt_opt(output.mean_mu),
        fmt_opt(output.se_mu),
    );
    out
}

/// Write every scan artifact into `dir`: `zeta_runs.csv`,
/// `zeta_summary.csv`, `records.json`, `meta.json`.
pub fn write_zeta_scan(dir: &Path, output: &ZetaScanOutput) -> Result<(), ReportError> {
    ensure_dir(dir)?;
    write_file(&dir.join("zeta_runs.csv"), &zeta_runs_csv(&output.records))?;
    write_file(&dir.join("zeta_summary.csv"), &zeta_summary_csv(output))?;
    let records = serde_json::to_string_pretty(output).expect("record serialization cannot fail");
    write_file(&dir.join("records.json"), &records)?;
    let total: f64 = output.records.iter().map(|r| r.wall_secs).sum();
    write_file(&dir.join("meta.json"), &meta_json(&output.config, total))
}
