//! Command-line entry point.
//!
//! Subcommands cover the pipeline end to end: `simulate` dumps orbits,
//! `fit` and `kstest` work on externally supplied samples, `sweep` runs
//! the full block-extrema experiment over the `n` grid, `zeta-scan` moves
//! the reference point across the interval, and `theory` prints the
//! closed-form predictions. Exit codes: 0 on success, 1 for usage or
//! configuration errors, 2 for runtime failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use evtlab::config::{
    parse_f64_list, parse_u64_list, ConfigError, ExperimentConfig, MapChoice, ObsChoice, Overrides,
};
use evtlab::pipeline::{self, PipelineError, RunRecord};
use evtlab::report::{self, ReportError};
use evtlab_core::gev::{fit_mle, FitResult};
use evtlab_core::stats::{ks_test_bootstrap, KsReport};
use evtlab_core::theory::{gnedenko_context, predict};

#[derive(Parser)]
#[command(
    name = "evtlab",
    version,
    about = "Extreme-value laboratory for measure-preserving maps",
    long_about = "Generates orbits of interval and torus maps, reduces them through \
distance observables, extracts block extrema, fits the generalized extreme value \
family, and compares the fits against closed-form normalizing sequences."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the configured map and emit the orbit as CSV
    Simulate(SimulateArgs),
    /// Fit the GEV family to a file of whitespace-separated numbers
    Fit(SampleArgs),
    /// Bootstrap goodness-of-fit for a file of whitespace-separated numbers
    Kstest(SampleArgs),
    /// Run the block-extrema sweep over the n grid and write report files
    Sweep(CommonArgs),
    /// Move the reference point across the interval and fit at each stop
    ZetaScan(ZetaScanArgs),
    /// Print closed-form predictions for every grid point as JSON
    Theory(CommonArgs),
}

/// Configuration source plus field-by-field overrides; flags win over the
/// file, the file wins over the defaults.
#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Map driving the orbit: bernoulli, cat, logistic, standard, translation
    #[arg(long)]
    map: Option<MapChoice>,
    /// Map parameter (shift factor, logistic rate, kick strength, rotation)
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    map_param: Option<f64>,
    /// Observable reducing the orbit: g1, g2, g3, min-distance
    #[arg(long)]
    observable: Option<ObsChoice>,
    /// Tail exponent of the power-law observables
    #[arg(long)]
    alpha: Option<f64>,
    /// Upper endpoint of the bounded observable
    #[arg(long = "C", value_name = "CAP")]
    cap: Option<f64>,
    /// Reference point coordinates, comma separated
    #[arg(long, value_name = "X[,Y]")]
    zeta: Option<String>,
    /// Series length; each run keeps n * floor(k/n) values
    #[arg(long)]
    k: Option<u64>,
    /// Block counts for the sweep, comma separated
    #[arg(long, value_name = "N1,N2,...")]
    n_grid: Option<String>,
    /// Base seed; every run derives its own stream from it
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap replicates for the goodness-of-fit test; 0 skips it
    #[arg(long, value_name = "R")]
    ks_replicates: Option<u32>,
    /// Worker threads; 0 uses all available cores
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for report files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SampleArgs {
    /// File of whitespace-separated sample values
    input: PathBuf,
    /// Bootstrap replicates (fit: default 0, kstest: default 500)
    #[arg(long, value_name = "R")]
    ks_replicates: Option<u32>,
    /// Seed for the bootstrap replicate streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ZetaScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of reference points spread over the open unit interval
    #[arg(long, default_value_t = 100)]
    points: usize,
}

/// Failures after argument parsing, split by exit code.
enum AppError {
    /// Bad configuration or request; exit code 1.
    Usage(String),
    /// IO or computation failure; exit code 2.
    Runtime(String),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => AppError::Runtime(e.to_string()),
            _ => AppError::Usage(e.to_string()),
        }
    }
}

impl From<PipelineError> for AppError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(inner) => inner.into(),
            PipelineError::EmptyGrid
            | PipelineError::ScanNeedsIntervalMap
            | PipelineError::ZeroScanPoints => AppError::Usage(e.to_string()),
            PipelineError::Pool(_) => AppError::Runtime(e.to_string()),
        }
    }
}

impl From<ReportError> for AppError {
    fn from(e: ReportError) -> Self {
        AppError::Runtime(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Fit(args) => sample_command(args, 0, false),
        Command::Kstest(args) => sample_command(args, 500, true),
        Command::Sweep(args) => sweep(args),
        Command::ZetaScan(args) => zeta_scan(args),
        Command::Theory(args) => theory(args),
    }
}

/// Write to stdout without panicking when the reader closed the pipe.
fn emit(text: &str) -> Result<(), AppError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(AppError::Runtime(format!("cannot write to stdout: {e}"))),
    }
}

/// Merge defaults, the optional file, and the flag overrides, then validate.
fn build_config(common: &CommonArgs) -> Result<ExperimentConfig, AppError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        map: common.map,
        map_param: common.map_param,
        observable: common.observable,
        alpha: common.alpha,
        cap: common.cap,
        zeta: common.zeta.as_deref().map(parse_f64_list).transpose()?,
        k: common.k,
        n_grid: common.n_grid.as_deref().map(parse_u64_list).transpose()?,
        seed: common.seed,
        ks_replicates: common.ks_replicates,
        workers: common.workers,
        out: common.out.clone(),
    };
    cfg.apply_overrides(&overrides);
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("evtlab-out"))
}

fn simulate(args: SimulateArgs) -> Result<(), AppError> {
    // an orbit dump never consults the block grid, so a short explicit k
    // must not be rejected against the default grid
    let mut args = args;
    args.common.n_grid.get_or_insert_with(|| "1".into());
    let cfg = build_config(&args.common)?;
    // a plain `simulate` emits a short orbit; an explicit k or a config
    // file opts into the full series length
    let steps = if args.common.k.is_some() || args.common.config.is_some() {
        cfg.k
    } else {
        1000
    };
    let steps = usize::try_from(steps)
        .map_err(|_| AppError::Usage(format!("k = {steps} does not fit in memory addressing")))?;
    let map = cfg.build_map()?;
    let zeta = cfg.zeta_point()?;
    let orbit = map
        .iterate(zeta, steps)
        .map_err(|e| AppError::Usage(e.to_string()))?;
    let mut csv = String::from(if map.dimension() == 1 { "t,x\n" } else { "t,x,y\n" });
    for (t, p) in orbit.enumerate() {
        match p.coords() {
            [x] => {
                let _ = writeln!(csv, "{t},{x}");
            }
            coords => {
                let _ = writeln!(csv, "{t},{},{}", coords[0], coords[1]);
            }
        }
    }
    match &args.common.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| {
                AppError::Runtime(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(())
        }
        None => emit(&csv),
    }
}

fn read_sample(path: &Path) -> Result<Vec<f64>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        let v: f64 = token
            .parse()
            .map_err(|_| AppError::Runtime(format!("not a number in sample file: '{token}'")))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(AppError::Runtime(format!("{} holds no values", path.display())));
    }
    Ok(values)
}

/// Shared body of `fit` and `kstest`: fit the sample, optionally bootstrap,
/// print one JSON document.
fn sample_command(args: SampleArgs, default_replicates: u32, need_fit: bool) -> Result<(), AppError> {
    let data = read_sample(&args.input)?;
    let replicates = args.ks_replicates.unwrap_or(default_replicates);
    let fit: FitResult = fit_mle(&data).map_err(|e| AppError::Runtime(e.to_string()))?;
    if need_fit && !fit.converged {
        // a goodness-of-fit verdict needs a trustworthy null fit
        eprintln!("warning: the fit did not converge; the bootstrap null may be off");
    }
    let ks: Option<KsReport> = if replicates > 0 {
        Some(
            ks_test_bootstrap(&data, &fit.params, replicates, args.seed)
                .map_err(|e| AppError::Runtime(e.to_string()))?,
        )
    } else {
        None
    };
    let doc = serde_json::json!({ "fit": fit, "ks": ks });
    let text = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    emit(&format!("{text}\n"))
}

fn describe_record(r: &RunRecord) -> String {
    match &r.fit {
        Some(f) => format!(
            "n={:<7} m={:<7} mu={:+.4e} sigma={:.4e} xi={:+.4} {}",
            r.n,
            r.m,
            f.params.mu(),
            f.params.sigma(),
            f.params.xi(),
            if f.converged { "converged" } else { "not converged" },
        ),
        None => format!(
            "n={:<7} m={:<7} failed: {}",
            r.n,
            r.m,
            r.error.as_deref().unwrap_or("unknown"),
        ),
    }
}

fn sweep(args: CommonArgs) -> Result<(), AppError> {
    let cfg = build_config(&args)?;
    let output = pipeline::run_sweep(&cfg)?;
    let mut text = String::new();
    for r in &output.records {
        let _ = writeln!(text, "{}", describe_record(r));
    }
    for reg in &output.regressions {
        let predicted = reg
            .predicted_slope
            .map_or_else(|| "none".to_string(), |p| format!("{p:+.6}"));
        let _ = writeln!(
            text,
            "{}: slope {:+.6} (predicted {predicted}), stderr {:.2e}, r2 {:.4}, {} points",
            reg.quantity, reg.fit.slope, reg.fit.slope_stderr, reg.fit.r_squared, reg.fit.n_points,
        );
    }
    let dir = out_dir(&cfg);
    report::write_sweep(&dir, &output)?;
    let _ = writeln!(text, "wrote {}", dir.display());
    emit(&text)
}

fn zeta_scan(args: ZetaScanArgs) -> Result<(), AppError> {
    let mut cfg = build_config(&args.common)?;
    // scans repeat the experiment at every reference point, so the
    // bootstrap only runs when asked for explicitly
    if args.common.ks_replicates.is_none() && args.common.config.is_none() {
        cfg.ks_replicates = 0;
    }
    let output = pipeline::run_zeta_scan(&cfg, args.points)?;
    let mut text = format!(
        "points={} converged={} mean_xi={} se_xi={} mean_sigma={} mean_mu={}\n",
        output.records.len(),
        output.converged,
        fmt_mean(output.mean_xi),
        fmt_mean(output.se_xi),
        fmt_mean(output.mean_sigma),
        fmt_mean(output.mean_mu),
    );
    let dir = out_dir(&cfg);
    report::write_zeta_scan(&dir, &output)?;
    let _ = writeln!(text, "wrote {}", dir.display());
    emit(&text)
}

fn fmt_mean(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:+.5}"))
}

fn theory(args: CommonArgs) -> Result<(), AppError> {
    let cfg = build_config(&args)?;
    let case = cfg.density_case().ok_or_else(|| {
        AppError::Usage(format!(
            "the {} map has no closed-form invariant density; predictions need \
bernoulli, cat, or the logistic map at rate 4",
            cfg.map
        ))
    })?;
    let obs = cfg.build_observable()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let m = cfg.k / n;
        if m == 0 {
            continue;
        }
        let prediction = predict(&obs, case, m).map_err(|e| AppError::Usage(e.to_string()))?;
        let context =
            gnedenko_context(&obs, case, m).map_err(|e| AppError::Usage(e.to_string()))?;
        rows.push(serde_json::json!({
            "n": n,
            "m": m,
            "prediction": prediction,
            "context": context,
        }));
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Array(rows))
        .expect("serialization cannot fail");
    emit(&format!("{text}\n"))
}
