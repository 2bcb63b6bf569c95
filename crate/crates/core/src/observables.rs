//! Distance observables along orbits.
//!
//! Given a reference point `zeta`, each orbit point is reduced to its torus
//! distance from `zeta` and transformed by one of three tail shapes
//!
//! * `g1(d) = -ln d` (exponential tail, Gumbel domain),
//! * `g2(d) = d^(-1/alpha)` (polynomial tail, Frechet domain),
//! * `g3(d) = C - d^(1/alpha)` (bounded tail, Weibull domain),
//!
//! or kept as the raw distance (`MinDistance`, analysed through block
//! minima). The orbit starts at `zeta` itself and the series runs over
//! `t = 1..k`, skipping the trivial zero distance at `t = 0`. Distances
//! below a small floor are clamped before transforming so the series stays
//! finite even on exact returns.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // as a trait import: std builds resolve these methods inherently
use num_traits::Float;

use crate::blockmax::ExtremumMode;
use crate::dynsys::{DynError, MapDef, Orbit, Point};

/// Default clamp for vanishing distances (exact returns to `zeta`).
pub const DEFAULT_DISTANCE_FLOOR: f64 = 1e-15;

/// Errors from observable construction and series generation.
#[derive(Clone, Debug, PartialEq)]
pub enum ObsError {
    InvalidParameter(&'static str),
    DimensionMismatch { expected: usize, got: usize },
    Dynamics(DynError),
}

impl fmt::Display for ObsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsError::InvalidParameter(what) => write!(f, "invalid observable parameter: {what}"),
            ObsError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ObsError::Dynamics(e) => write!(f, "orbit generation failed: {e}"),
        }
    }
}

impl core::error::Error for ObsError {}

impl From<DynError> for ObsError {
    fn from(e: DynError) -> Self {
        ObsError::Dynamics(e)
    }
}

/// Observable variant. `alpha` controls the polynomial tail index, `cap` is
/// the finite upper endpoint of `g3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObservableKind {
    G1,
    G2 { alpha: f64 },
    G3 { alpha: f64, cap: f64 },
    MinDistance,
}

/// An observable bound to its reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableDef {
    kind: ObservableKind,
    zeta: Point,
    floor: f64,
}

impl ObservableDef {
    pub fn new(kind: ObservableKind, zeta: Point) -> Result<Self, ObsError> {
        match kind {
            ObservableKind::G2 { alpha } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(ObsError::InvalidParameter("alpha must be positive"));
                }
            }
            ObservableKind::G3 { alpha, cap } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(ObsError::InvalidParameter("alpha must be positive"));
                }
                if !(cap > 0.0) || !cap.is_finite() {
                    return Err(ObsError::InvalidParameter("cap must be positive"));
                }
            }
            _ => {}
        }
        if !zeta.is_finite() {
            return Err(ObsError::InvalidParameter("zeta must be finite"));
        }
        Ok(ObservableDef { kind, zeta, floor: DEFAULT_DISTANCE_FLOOR })
    }

    /// Replace the distance floor (must be positive and below 1).
    pub fn with_floor(mut self, floor: f64) -> Result<Self, ObsError> {
        if !(floor > 0.0 && floor < 1.0) {
            return Err(ObsError::InvalidParameter("distance floor must lie in (0,1)"));
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn zeta(&self) -> Point {
        self.zeta
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Which block extremum carries the extreme-value information: maxima
    /// for the diverging/bounded transforms, minima for raw distances.
    pub fn extremum_mode(&self) -> ExtremumMode {
        match self.kind {
            ObservableKind::MinDistance => ExtremumMode::Min,
            _ => ExtremumMode::Max,
        }
    }

    /// Transform one distance value (after the floor clamp).
    pub fn apply(&self, dist: f64) -> f64 {
        let d = dist.max(self.floor);
        match self.kind {
            ObservableKind::G1 => -d.ln(),
            ObservableKind::G2 { alpha } => d.powf(-1.0 / alpha),
            ObservableKind::G3 { alpha, cap } => cap - d.powf(1.0 / alpha),
            ObservableKind::MinDistance => d,
        }
    }
}

/// Distance on the unit torus: coordinate-wise shortest wrap, Euclidean
/// across coordinates. Bounded by `sqrt(d)/2`.
pub fn torus_distance(a: Point, b: Point) -> Result<f64, ObsError> {
    if a.dim() != b.dim() {
        return Err(ObsError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(torus_distance_unchecked(a, b))
}

fn torus_distance_unchecked(a: Point, b: Point) -> f64 {
    let wrap = |u: f64, v: f64| {
        let s = (u - v).abs();
        s.min(1.0 - s)
    };
    let ac = a.coords();
    let bc = b.coords();
    if ac.len() == 1 {
        wrap(ac[0], bc[0])
    } else {
        let wx = wrap(ac[0], bc[0]);
        let wy = wrap(ac[1], bc[1]);
        (wx * wx + wy * wy).sqrt()
    }
}

/// Materialised observable series over `t = 1..k`.
#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub values: Vec<f64>,
    pub extremum_mode: ExtremumMode,
}

/// Streaming counterpart of [`observable_series`]; yields exactly `k`
/// values in constant memory.
pub struct SeriesIter {
    orbit: Orbit,
    obs: ObservableDef,
}

impl Iterator for SeriesIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let p = self.orbit.next()?;
        Some(self.obs.apply(torus_distance_unchecked(p, self.obs.zeta)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.orbit.size_hint()
    }
}

impl ExactSizeIterator for SeriesIter {}

/// Build the series lazily: the orbit starts at `zeta`, the value at `t = 0`
/// is skipped, and the `k` values for `t = 1..k` are produced on demand.
pub fn series_iter(map: &MapDef, obs: &ObservableDef, k: usize) -> Result<SeriesIter, ObsError> {
    if k == 0 {
        return Err(ObsError::Dynamics(DynError::EmptyOrbit));
    }
    if obs.zeta.dim() != map.dimension() {
        return Err(ObsError::DimensionMismatch {
            expected: map.dimension(),
            got: obs.zeta.dim(),
        });
    }
    let mut orbit = map.iterate(obs.zeta, k + 1)?;
    orbit.next();
    Ok(SeriesIter { orbit, obs: *obs })
}

/// Materialise the full series; convenient for tests and short runs.
pub fn observable_series(
    map: &MapDef,
    obs: &ObservableDef,
    k: usize,
) -> Result<ObservableSeries, ObsError> {
    let iter = series_iter(map, obs, k)?;
    Ok(ObservableSeries { values: iter.collect(), extremum_mode: obs.extremum_mode() })
}
