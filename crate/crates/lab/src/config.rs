//! Experiment configuration: defaults, JSON files, CLI overrides.
//!
//! A configuration is complete by construction: every field has a default,
//! a JSON file may set any subset, and command-line flags override both.
//! Validation happens once, in [`ExperimentConfig::validate`], so the
//! pipeline can assume a well-formed experiment.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use evtlab_core::dynsys::{MapDef, Point};
use evtlab_core::observables::{ObservableDef, ObservableKind};
use evtlab_core::theory::DensityCase;

/// Series length `k`; the block layout truncates to `n * floor(k/n)`.
pub const DEFAULT_K: u64 = 10_000_000;
pub const DEFAULT_ALPHA: f64 = 3.0;
/// Upper endpoint of the bounded observable.
pub const DEFAULT_CAP: f64 = 10.0;
/// Reference-point coordinate used for every axis when none is given.
pub const DEFAULT_ZETA: f64 = 0.51;
pub const DEFAULT_KS_REPLICATES: u32 = 500;
pub const DEFAULT_SEED: u64 = 1;

/// Errors from building or validating a configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    /// Reading the configuration file failed.
    Io { path: String, message: String },
    /// The configuration file is not valid JSON for this schema.
    Parse(String),
    /// A field value is out of range or inconsistent.
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Which map drives the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapChoice {
    Bernoulli,
    Cat,
    Logistic,
    Standard,
    Translation,
}

impl MapChoice {
    pub const ALL_TOKENS: &'static str = "bernoulli, cat, logistic, standard, translation";

    pub fn token(self) -> &'static str {
        match self {
            MapChoice::Bernoulli => "bernoulli",
            MapChoice::Cat => "cat",
            MapChoice::Logistic => "logistic",
            MapChoice::Standard => "standard",
            MapChoice::Translation => "translation",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            MapChoice::Cat | MapChoice::Standard => 2,
            _ => 1,
        }
    }

    /// Parameter used when the configuration leaves `map_param` unset:
    /// shift factor 3, logistic rate 4, kick strength 1e-4, rotation by
    /// `sqrt(2) - 1`. The cat map has no parameter.
    pub fn default_param(self) -> Option<f64> {
        match self {
            MapChoice::Bernoulli => Some(3.0),
            MapChoice::Cat => None,
            MapChoice::Logistic => Some(4.0),
            MapChoice::Standard => Some(1e-4),
            MapChoice::Translation => Some(std::f64::consts::SQRT_2 - 1.0),
        }
    }
}

impl fmt::Display for MapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MapChoice {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "bernoulli" => Ok(MapChoice::Bernoulli),
            "cat" => Ok(MapChoice::Cat),
            "logistic" => Ok(MapChoice::Logistic),
            "standard" => Ok(MapChoice::Standard),
            "translation" => Ok(MapChoice::Translation),
            other => Err(ConfigError::Invalid(format!(
                "unknown map '{other}' (expected one of: {})",
                MapChoice::ALL_TOKENS
            ))),
        }
    }
}

/// Which observable reduces the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObsChoice {
    G1,
    G2,
    G3,
    MinDistance,
}

impl ObsChoice {
    pub const ALL_TOKENS: &'static str = "g1, g2, g3, min-distance";

    pub fn token(self) -> &'static str {
        match self {
            ObsChoice::G1 => "g1",
            ObsChoice::G2 => "g2",
            ObsChoice::G3 => "g3",
            ObsChoice::MinDistance => "min-distance",
        }
    }
}

impl fmt::Display for ObsChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ObsChoice {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "g1" => Ok(ObsChoice::G1),
            "g2" => Ok(ObsChoice::G2),
            "g3" => Ok(ObsChoice::G3),
            "min-distance" => Ok(ObsChoice::MinDistance),
            other => Err(ConfigError::Invalid(format!(
                "unknown observable '{other}' (expected one of: {})",
                ObsChoice::ALL_TOKENS
            ))),
        }
    }
}

/// One experiment: a map, an observable, the series/block layout, and the
/// reporting knobs. `k = n m` is enforced by truncation at run time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapChoice,
    /// Map parameter; `None` picks the per-map default.
    pub map_param: Option<f64>,
    pub observable: ObsChoice,
    pub alpha: f64,
    /// Upper endpoint of the bounded observable (ignored by the others).
    pub cap: f64,
    /// Reference point; `None` places 0.51 on every axis.
    pub zeta: Option<Vec<f64>>,
    pub k: u64,
    pub n_grid: Vec<u64>,
    pub seed: u64,
    /// Bootstrap replicate count; 0 skips the goodness-of-fit test.
    pub ks_replicates: u32,
    /// Worker threads for sweeps and scans; 0 uses all available.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            map: MapChoice::Bernoulli,
            map_param: None,
            observable: ObsChoice::G1,
            alpha: DEFAULT_ALPHA,
            cap: DEFAULT_CAP,
            zeta: None,
            k: DEFAULT_K,
            n_grid: default_n_grid(),
            seed: DEFAULT_SEED,
            ks_replicates: DEFAULT_KS_REPLICATES,
            workers: 0,
            out: None,
        }
    }
}

/// Sixteen logarithmically spaced block counts spanning `[10^2, 10^5]`,
/// giving at least six points with both `n >= 10^3` and `m = k/n >= 10^3`
/// at the default series length.
pub fn default_n_grid() -> Vec<u64> {
    (0..16)
        .map(|i| 10f64.powf(2.0 + 3.0 * i as f64 / 15.0).round() as u64)
        .collect()
}

/// Command-line overrides; every field is optional and wins over both the
/// defaults and a configuration file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub map: Option<MapChoice>,
    pub map_param: Option<f64>,
    pub observable: Option<ObsChoice>,
    pub alpha: Option<f64>,
    pub cap: Option<f64>,
    pub zeta: Option<Vec<f64>>,
    pub k: Option<u64>,
    pub n_grid: Option<Vec<u64>>,
    pub seed: Option<u64>,
    pub ks_replicates: Option<u32>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parse a JSON configuration file.
    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(v) = o.map {
            self.map = v;
        }
        if let Some(v) = o.map_param {
            self.map_param = Some(v);
        }
        if let Some(v) = o.observable {
            self.observable = v;
        }
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.cap {
            self.cap = v;
        }
        if let Some(v) = &o.zeta {
            self.zeta = Some(v.clone());
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = &o.n_grid {
            self.n_grid = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.ks_replicates {
            self.ks_replicates = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
    }

    /// Build the configured map, validating its parameter.
    pub fn build_map(&self) -> Result<MapDef, ConfigError> {
        let bad = |msg: String| ConfigError::Invalid(msg);
        match self.map {
            MapChoice::Bernoulli => {
                let q = self.map_param.unwrap_or(3.0);
                if !q.is_finite() || q.fract() != 0.0 || !(2.0..=u32::MAX as f64).contains(&q) {
                    return Err(bad(format!("bernoulli factor must be an integer >= 2, got {q}")));
                }
                MapDef::bernoulli(q as u32).map_err(|e| bad(e.to_string()))
            }
            MapChoice::Cat => {
                if self.map_param.is_some() {
                    return Err(bad("the cat map takes no parameter".into()));
                }
                Ok(MapDef::arnold_cat())
            }
            MapChoice::Logistic => MapDef::logistic(self.map_param.unwrap_or(4.0))
                .map_err(|e| bad(e.to_string())),
            MapChoice::Standard => MapDef::standard(self.map_param.unwrap_or(1e-4))
                .map_err(|e| bad(e.to_string())),
            MapChoice::Translation => {
                MapDef::translation(self.map_param.unwrap_or(std::f64::consts::SQRT_2 - 1.0))
                    .map_err(|e| bad(e.to_string()))
            }
        }
    }

    /// Reference point in the map's phase space.
    pub fn zeta_point(&self) -> Result<Point, ConfigError> {
        let d = self.map.dimension();
        let coords: Vec<f64> = match &self.zeta {
            Some(v) => v.clone(),
            None => vec![DEFAULT_ZETA; d],
        };
        if coords.len() != d {
            return Err(ConfigError::Invalid(format!(
                "zeta has {} coordinates but the {} map needs {d}",
                coords.len(),
                self.map
            )));
        }
        if coords.iter().any(|c| !c.is_finite() || !(0.0..=1.0).contains(c)) {
            return Err(ConfigError::Invalid("zeta coordinates must lie in [0,1]".into()));
        }
        Ok(if d == 1 { Point::d1(coords[0]) } else { Point::d2(coords[0], coords[1]) })
    }

    /// Build the configured observable at the reference point.
    pub fn build_observable(&self) -> Result<ObservableDef, ConfigError> {
        let zeta = self.zeta_point()?;
        let kind = match self.observable {
            ObsChoice::G1 => ObservableKind::G1,
            ObsChoice::G2 => ObservableKind::G2 { alpha: self.alpha },
            ObsChoice::G3 => ObservableKind::G3 { alpha: self.alpha, cap: self.cap },
            ObsChoice::MinDistance => ObservableKind::MinDistance,
        };
        ObservableDef::new(kind, zeta).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Invariant-density family backing closed-form predictions, when one
    /// is known for the configured map.
    pub fn density_case(&self) -> Option<DensityCase> {
        match self.map {
            MapChoice::Bernoulli | MapChoice::Cat => Some(DensityCase::Uniform),
            MapChoice::Logistic if self.map_param.unwrap_or(4.0) == 4.0 => {
                Some(DensityCase::Arcsine)
            }
            _ => None,
        }
    }

    /// Check every field; the pipeline assumes a validated configuration.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build_map()?;
        self.build_observable()?;
        if self.k == 0 {
            return Err(ConfigError::Invalid("series length k must be positive".into()));
        }
        if self.n_grid.is_empty() {
            return Err(ConfigError::Invalid("n_grid must be non-empty".into()));
        }
        for &n in &self.n_grid {
            if n == 0 {
                return Err(ConfigError::Invalid("block counts must be positive".into()));
            }
            if n > self.k {
                return Err(ConfigError::Invalid(format!(
                    "block count {n} exceeds series length k = {}",
                    self.k
                )));
            }
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(ConfigError::Invalid("alpha must be positive".into()));
        }
        if !(self.cap > 0.0) || !self.cap.is_finite() {
            return Err(ConfigError::Invalid("cap must be positive".into()));
        }
        Ok(())
    }
}

/// Parse a comma-separated list of floats (used for `--zeta`).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::Invalid(format!("not a number: '{t}'")))
        })
        .collect()
}

/// Parse a comma-separated list of positive integers (used for `--n-grid`).
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, ConfigError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| ConfigError::Invalid(format!("not a positive integer: '{t}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_sixteen_log_spaced_points() {
        let g = default_n_grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&100_000));
        assert!(g.contains(&1000) && g.contains(&10_000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn default_config_validates() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn zeta_defaults_to_the_map_dimension() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.zeta_point().unwrap(), Point::d1(0.51));
        cfg.map = MapChoice::Cat;
        assert_eq!(cfg.zeta_point().unwrap(), Point::d2(0.51, 0.51));
    }

    #[test]
    fn zeta_dimension_mismatch_is_rejected() {
        let cfg = ExperimentConfig {
            map: MapChoice::Cat,
            zeta: Some(vec![0.3]),
            ..Default::default()
        };
        assert!(matches!(cfg.zeta_point(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn map_parameters_are_validated() {
        let mut cfg = ExperimentConfig { map_param: Some(2.5), ..Default::default() };
        assert!(cfg.build_map().is_err()); // non-integer shift factor
        cfg.map_param = Some(3.0);
        assert_eq!(cfg.build_map().unwrap(), MapDef::bernoulli(3).unwrap());
        cfg.map = MapChoice::Cat;
        assert!(cfg.build_map().is_err()); // cat takes no parameter
        cfg.map_param = None;
        assert_eq!(cfg.build_map().unwrap(), MapDef::arnold_cat());
    }

    #[test]
    fn density_case_tracks_the_map_and_parameter() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.density_case(), Some(DensityCase::Uniform));
        cfg.map = MapChoice::Logistic;
        assert_eq!(cfg.density_case(), Some(DensityCase::Arcsine));
        cfg.map_param = Some(3.9);
        assert_eq!(cfg.density_case(), None);
        cfg.map = MapChoice::Standard;
        cfg.map_param = None;
        assert_eq!(cfg.density_case(), None);
    }

    #[test]
    fn json_round_trip_preserves_the_config() {
        let cfg = ExperimentConfig {
            map: MapChoice::Logistic,
            observable: ObsChoice::G2,
            zeta: Some(vec![0.3]),
            k: 1_000_000,
            n_grid: vec![100, 1000],
            ..Default::default()
        };
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_json_fills_defaults_and_rejects_unknown_keys() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"map": "cat", "k": 5000}"#).unwrap();
        assert_eq!(cfg.map, MapChoice::Cat);
        assert_eq!(cfg.k, 5000);
        assert_eq!(cfg.alpha, DEFAULT_ALPHA);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"mapp": "cat"}"#).is_err());
    }

    #[test]
    fn overrides_win_over_file_values() {
        let mut cfg = ExperimentConfig::default();
        let o = Overrides {
            map: Some(MapChoice::Translation),
            k: Some(1234),
            seed: Some(9),
            ..Default::default()
        };
        cfg.apply_overrides(&o);
        assert_eq!(cfg.map, MapChoice::Translation);
        assert_eq!(cfg.k, 1234);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.alpha, DEFAULT_ALPHA);
    }

    #[test]
    fn grid_entries_above_k_are_rejected() {
        let cfg = ExperimentConfig { k: 500, n_grid: vec![100, 600], ..Default::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn list_parsers_handle_spaces_and_errors() {
        assert_eq!(parse_f64_list("0.3, 0.6").unwrap(), vec![0.3, 0.6]);
        assert_eq!(parse_u64_list("100,1000").unwrap(), vec![100, 1000]);
        assert!(parse_f64_list("0.3,x").is_err());
        assert!(parse_u64_list("-5").is_err());
    }
}
