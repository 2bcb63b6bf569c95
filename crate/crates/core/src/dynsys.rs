//! Discrete-time dynamical systems on the unit interval and the 2-torus.
//!
//! Five maps are provided, all measure preserving on `[0,1]^d`:
//!
//! * Bernoulli shift `x -> q x mod 1` (uniform invariant density),
//! * Arnold cat map `(x,y) -> (2x+y, x+y) mod 1` (uniform),
//! * logistic map `x -> r x (1-x)`, whose `r = 4` invariant density is the
//!   arcsine law `1/(pi sqrt(x(1-x)))`,
//! * standard map `y' = y + lambda/(2 pi) sin(2 pi x)`, `x' = x + y'` (mod 1),
//! * rigid torus translation `x -> x + beta mod 1`.
//!
//! Orbits are produced by a streaming iterator so arbitrarily long runs use
//! constant memory. All arithmetic is double precision; `mod 1` is
//! `x - floor(x)` with an exact-1.0 result clamped to 0.0 so points stay in
//! the half-open fundamental domain.

use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // as a trait import: std builds resolve these methods inherently
use num_traits::Float;

use crate::theory;

/// A point of the phase space, one or two coordinates in `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    dim: u8,
    c: [f64; 2],
}

impl Point {
    /// Interval point.
    pub fn d1(x: f64) -> Self {
        Point { dim: 1, c: [x, 0.0] }
    }

    /// Torus point.
    pub fn d2(x: f64, y: f64) -> Self {
        Point { dim: 2, c: [x, y] }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Coordinates as a slice of length `dim()`.
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    pub fn x(&self) -> f64 {
        self.c[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    fn in_unit_domain(&self) -> bool {
        self.coords().iter().all(|&v| (0.0..=1.0).contains(&v))
    }
}

/// Errors from map construction and orbit generation.
#[derive(Clone, Debug, PartialEq)]
pub enum DynError {
    /// A map parameter violates its admissible range.
    InvalidParameter(&'static str),
    /// Point dimension does not match the map's phase space.
    DimensionMismatch { expected: usize, got: usize },
    /// Initial condition outside `[0,1]^d` or non-finite.
    OutOfDomain,
    /// Density evaluation where the invariant density diverges.
    DensityUndefined,
    /// Requested an orbit of length zero.
    EmptyOrbit,
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::InvalidParameter(what) => write!(f, "invalid map parameter: {what}"),
            DynError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: map needs {expected}, point has {got}")
            }
            DynError::OutOfDomain => write!(f, "point outside [0,1]^d or non-finite"),
            DynError::DensityUndefined => write!(f, "invariant density diverges at this point"),
            DynError::EmptyOrbit => write!(f, "orbit length must be at least 1"),
        }
    }
}

impl core::error::Error for DynError {}

/// Map selector with parameters. Build through the constructors, which
/// validate parameter ranges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapDef {
    BernoulliShift { q: u32 },
    ArnoldCat,
    Logistic { r: f64 },
    StandardMap { lambda: f64 },
    TorusTranslation { beta: f64 },
}

/// `x mod 1` on the half-open interval `[0,1)`: an exact 1.0 (possible when
/// rounding lands on the boundary) is identified with 0.
fn mod1(x: f64) -> f64 {
    let w = x - x.floor();
    if w == 1.0 {
        0.0
    } else {
        w
    }
}

impl MapDef {
    /// `x -> q x mod 1`, `q >= 2`.
    pub fn bernoulli(q: u32) -> Result<Self, DynError> {
        if q < 2 {
            return Err(DynError::InvalidParameter("bernoulli factor q must be >= 2"));
        }
        Ok(MapDef::BernoulliShift { q })
    }

    /// `(x,y) -> (2x+y, x+y) mod 1`.
    pub fn arnold_cat() -> Self {
        MapDef::ArnoldCat
    }

    /// `x -> r x (1-x)`, `0 < r <= 4` so `[0,1]` stays invariant.
    pub fn logistic(r: f64) -> Result<Self, DynError> {
        if !(r > 0.0 && r <= 4.0) || !r.is_finite() {
            return Err(DynError::InvalidParameter("logistic rate r must lie in (0,4]"));
        }
        Ok(MapDef::Logistic { r })
    }

    /// Chirikov standard map with kick strength `lambda >= 0`.
    pub fn standard(lambda: f64) -> Result<Self, DynError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(DynError::InvalidParameter("standard-map lambda must be >= 0"));
        }
        Ok(MapDef::StandardMap { lambda })
    }

    /// `x -> x + beta mod 1`, `beta` in `(0,1)`.
    pub fn translation(beta: f64) -> Result<Self, DynError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(DynError::InvalidParameter("translation beta must lie in (0,1)"));
        }
        Ok(MapDef::TorusTranslation { beta })
    }

    /// Phase-space dimension: 1 for interval maps, 2 for torus maps.
    pub fn dimension(&self) -> usize {
        match self {
            MapDef::ArnoldCat | MapDef::StandardMap { .. } => 2,
            _ => 1,
        }
    }

    /// One application of the map.
    pub fn step(&self, p: Point) -> Result<Point, DynError> {
        if p.dim() != self.dimension() {
            return Err(DynError::DimensionMismatch { expected: self.dimension(), got: p.dim() });
        }
        Ok(self.step_unchecked(p))
    }

    fn step_unchecked(&self, p: Point) -> Point {
        match *self {
            MapDef::BernoulliShift { q } => Point::d1(mod1(q as f64 * p.c[0])),
            MapDef::ArnoldCat => {
                let (x, y) = (p.c[0], p.c[1]);
                Point::d2(mod1(2.0 * x + y), mod1(x + y))
            }
            MapDef::Logistic { r } => Point::d1(r * p.c[0] * (1.0 - p.c[0])),
            MapDef::StandardMap { lambda } => {
                let (x, y) = (p.c[0], p.c[1]);
                let y1 = mod1(y + lambda / (2.0 * PI) * (2.0 * PI * x).sin());
                Point::d2(mod1(x + y1), y1)
            }
            MapDef::TorusTranslation { beta } => Point::d1(mod1(p.c[0] + beta)),
        }
    }

    /// Pointwise invariant density where a closed form is known:
    /// uniform maps give 1, `Logistic(4)` gives the arcsine law, everything
    /// else reports `None`.
    pub fn invariant_density(&self, p: Point) -> Result<Option<f64>, DynError> {
        if p.dim() != self.dimension() {
            return Err(DynError::DimensionMismatch { expected: self.dimension(), got: p.dim() });
        }
        match *self {
            MapDef::BernoulliShift { .. } | MapDef::ArnoldCat => Ok(Some(1.0)),
            MapDef::Logistic { r } if r == 4.0 => match theory::arcsine_density(p.c[0]) {
                Ok(rho) => Ok(Some(rho)),
                Err(_) => Err(DynError::DensityUndefined),
            },
            _ => Ok(None),
        }
    }

    /// Streaming orbit of exactly `k` points, the first of which is `initial`.
    pub fn iterate(&self, initial: Point, k: usize) -> Result<Orbit, DynError> {
        if k == 0 {
            return Err(DynError::EmptyOrbit);
        }
        if initial.dim() != self.dimension() {
            return Err(DynError::DimensionMismatch {
                expected: self.dimension(),
                got: initial.dim(),
            });
        }
        if !initial.is_finite() || !initial.in_unit_domain() {
            return Err(DynError::OutOfDomain);
        }
        Ok(Orbit { map: *self, next: initial, remaining: k })
    }
}

/// Lazily generated orbit; yields `k` points and then stops.
#[derive(Clone, Debug)]
pub struct Orbit {
    map: MapDef,
    next: Point,
    remaining: usize,
}

impl Iterator for Orbit {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let current = self.next;
        self.next = self.map.step_unchecked(current);
        Some(current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Orbit {}

/// Coarse-grained cell occupancy of an orbit, used both as a runtime guard
/// against finite-precision orbit collapse and for uniformity diagnostics.
#[derive(Clone, Debug)]
pub struct OccupancyGrid {
    bins_per_axis: usize,
    dim: usize,
    counts: alloc::vec::Vec<u64>,
    total: u64,
}

impl OccupancyGrid {
    pub fn new(dim: usize, bins_per_axis: usize) -> Self {
        assert!(dim == 1 || dim == 2, "grid supports dimensions 1 and 2");
        assert!(bins_per_axis >= 1);
        let cells = if dim == 1 { bins_per_axis } else { bins_per_axis * bins_per_axis };
        OccupancyGrid {
            bins_per_axis,
            dim,
            counts: alloc::vec![0; cells],
            total: 0,
        }
    }

    pub fn push(&mut self, p: Point) {
        debug_assert_eq!(p.dim(), self.dim);
        let b = self.bins_per_axis;
        let cell_of = |v: f64| -> usize {
            let i = (v * b as f64).floor() as usize;
            i.min(b - 1)
        };
        let idx = if self.dim == 1 {
            cell_of(p.c[0])
        } else {
            cell_of(p.c[0]) * b + cell_of(p.c[1])
        };
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of cells visited at least once.
    pub fn cells_visited(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    /// Smallest and largest per-cell frequency.
    pub fn frequency_range(&self) -> (f64, f64) {
        let t = self.total.max(1) as f64;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &c in &self.counts {
            let f = c as f64 / t;
            lo = lo.min(f);
            hi = hi.max(f);
        }
        (lo, hi)
    }
}
