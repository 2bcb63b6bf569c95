//! Closed-form extreme-value predictions for the distance observables.
//!
//! For an orbit sampled from an invariant density, the distribution of the
//! block maximum of `g(dist(x, zeta))` converges to a generalized extreme
//! value law whose normalizing sequences follow from the measure of small
//! balls around the target point. Two ball-measure cases are covered:
//!
//! * uniform density on `[0,1]^d`: a radius-`delta` ball has measure
//!   `omega_d delta^d` with `omega_1 = 2`, `omega_2 = pi`;
//! * the arcsine law `rho(zeta) = 1/(pi sqrt(zeta(1-zeta)))`, the invariant
//!   density of the full quadratic map, where the ball measure is
//!   `2 rho(zeta) delta` to first order with computable corrections.
//!
//! From these the module produces, per observable, the `(1 - 1/m)` tail
//! quantile `gamma_m`, the mean-excess value that fixes the scale sequence,
//! and the resulting GEV parameter predictions `(mu, sigma, xi)` together
//! with the slopes those parameters must trace when the block count `n`
//! varies at a fixed orbit length `k = n m`.

use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // as a trait import: std builds resolve these methods inherently
use num_traits::Float;

use crate::dynsys::Point;
use crate::observables::{ObservableDef, ObservableKind};

/// Ball measure of the unit interval metric: length of a unit-radius ball.
pub const OMEGA_1: f64 = 2.0;
/// Ball measure on the 2-torus metric: area of a unit-radius disk.
pub const OMEGA_2: f64 = PI;

/// Coefficient functions are guarded away from the interval endpoints,
/// where they diverge.
const COEFFICIENT_GUARD: f64 = 1e-6;
/// First-order arcsine predictions hold only inside this band.
const VALIDITY_BAND: f64 = 1e-3;

/// Errors from the prediction routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TheoryError {
    /// Target coordinate outside the admissible part of the unit interval.
    CenterOutOfDomain(f64),
    /// The ball `(zeta - delta, zeta + delta)` leaves the unit interval.
    BallOutsideDomain { zeta: f64, delta: f64 },
    /// Arcsine predictions are restricted to `zeta` away from the endpoints.
    OutsideValidityBand(f64),
    /// Block size below the asymptotic regime the formulas assume.
    BlockSizeTooSmall { m: u64, min: u64 },
    /// The raw minimum distance has no GEV parameter prediction here.
    UnsupportedObservable,
    /// Arcsine forms apply to one-dimensional targets only.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryError::CenterOutOfDomain(z) => {
                write!(f, "target coordinate {z} outside the open unit interval")
            }
            TheoryError::BallOutsideDomain { zeta, delta } => {
                write!(f, "ball of radius {delta} around {zeta} leaves the unit interval")
            }
            TheoryError::OutsideValidityBand(z) => {
                write!(f, "target coordinate {z} outside the ({VALIDITY_BAND}, 1-{VALIDITY_BAND}) validity band")
            }
            TheoryError::BlockSizeTooSmall { m, min } => {
                write!(f, "block size {m} below the asymptotic minimum {min}")
            }
            TheoryError::UnsupportedObservable => {
                write!(f, "no closed-form GEV prediction for this observable")
            }
            TheoryError::DimensionMismatch { expected, got } => {
                write!(f, "expected a {expected}-dimensional target, got {got}")
            }
        }
    }
}

impl core::error::Error for TheoryError {}

/// Invariant density of the full quadratic map, `1/(pi sqrt(z(1-z)))`.
pub fn arcsine_density(zeta: f64) -> Result<f64, TheoryError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(TheoryError::CenterOutOfDomain(zeta));
    }
    Ok(1.0 / (PI * (zeta * (1.0 - zeta)).sqrt()))
}

/// Arcsine measure of the ball `(zeta - delta, zeta + delta)`, exact form
/// `(2/pi)[asin(sqrt(zeta+delta)) - asin(sqrt(zeta-delta))]`.
pub fn arcsine_ball_measure(zeta: f64, delta: f64) -> Result<f64, TheoryError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(TheoryError::BallOutsideDomain { zeta, delta });
    }
    if !(zeta - delta > 0.0 && zeta + delta < 1.0) {
        return Err(TheoryError::BallOutsideDomain { zeta, delta });
    }
    Ok(2.0 / PI * ((zeta + delta).sqrt().asin() - (zeta - delta).sqrt().asin()))
}

/// Small-`delta` series form of [`arcsine_ball_measure`]:
/// `2 rho(zeta) delta [1 + delta^2 c(zeta)]` with the curvature coefficient
/// from [`arcsine_series_coefficient`]. Agrees with the exact form to
/// third order in `delta`.
pub fn arcsine_ball_series(zeta: f64, delta: f64) -> Result<f64, TheoryError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(TheoryError::BallOutsideDomain { zeta, delta });
    }
    if !(zeta - delta > 0.0 && zeta + delta < 1.0) {
        return Err(TheoryError::BallOutsideDomain { zeta, delta });
    }
    let rho = arcsine_density(zeta)?;
    let c = arcsine_series_coefficient(zeta)?;
    Ok(2.0 * rho * delta * (1.0 + delta * delta * c))
}

/// Quadratic coefficient of the arcsine ball-measure expansion in the ball
/// radius: `(1/8)(1/z^2 + 1/(1-z)^2) - 1/(12 z (1-z))`. Symmetric under
/// `z -> 1-z`.
pub fn arcsine_series_coefficient(zeta: f64) -> Result<f64, TheoryError> {
    guard_coefficient_domain(zeta)?;
    let z = zeta;
    let w = 1.0 - zeta;
    Ok((1.0 / (z * z) + 1.0 / (w * w)) / 8.0 - 1.0 / (12.0 * z * w))
}

/// Four-term coefficient entering the finite-`m` scale correction of the
/// g1 prediction on the quadratic map:
/// `1/(8z^2) - 2/(z(1-z)) + 2/(z^2(1-z)) + 6/(z^2(1-z)^2)`.
/// Related to but distinct from [`arcsine_series_coefficient`]; the
/// ball-measure series keeps that one.
pub fn quadratic_correction_coefficient(zeta: f64) -> Result<f64, TheoryError> {
    guard_coefficient_domain(zeta)?;
    let z = zeta;
    let w = 1.0 - zeta;
    Ok(1.0 / (8.0 * z * z) - 2.0 / (z * w) + 2.0 / (z * z * w) + 6.0 / (z * z * w * w))
}

fn guard_coefficient_domain(zeta: f64) -> Result<(), TheoryError> {
    if !(zeta > COEFFICIENT_GUARD && zeta < 1.0 - COEFFICIENT_GUARD) {
        return Err(TheoryError::CenterOutOfDomain(zeta));
    }
    Ok(())
}

/// Which invariant density drives the ball-measure asymptotics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DensityCase {
    /// Uniform density on `[0,1]^d` (Bernoulli shift, cat map, translation).
    Uniform,
    /// Arcsine density of the full quadratic map (one-dimensional).
    Arcsine,
}

/// Predicted GEV parameters and normalizing sequences at block size `m`,
/// plus the slopes traced against the block count `n` at fixed `k = n m`.
///
/// `sigma_pred = 1/a_m` and `mu_pred = b_m` throughout: an unnormalized fit
/// of the block maxima absorbs the normalizing sequences into its scale and
/// location.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoryPrediction {
    pub a_m: f64,
    pub b_m: f64,
    pub sigma_pred: f64,
    pub mu_pred: f64,
    pub xi_pred: f64,
    /// Slope of `log10 mu` against `log10 n`; `None` where not linear.
    pub slope_log_mu_vs_log_n: Option<f64>,
    /// Slope of `log10 sigma` against `log10 n`; `None` where not linear.
    pub slope_log_sigma_vs_log_n: Option<f64>,
    /// Slope of `mu` against `ln n`; `None` where not linear.
    pub slope_mu_vs_ln_n: Option<f64>,
}

/// Tail quantile and mean-excess summary behind a prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GnedenkoContext {
    /// `gamma_m = F^{-1}(1 - 1/m)`, the once-per-block exceedance level.
    pub gamma_m: f64,
    /// Mean-excess value `G(gamma_m)`; the scale sequence is `1/G`.
    pub g_t: f64,
    /// Right endpoint of the observable distribution; `+inf` if unbounded.
    pub u_f: f64,
}

fn omega(d: usize) -> f64 {
    if d == 1 {
        OMEGA_1
    } else {
        OMEGA_2
    }
}

fn shape_for(kind: ObservableKind, d: f64) -> Result<f64, TheoryError> {
    match kind {
        ObservableKind::G1 => Ok(0.0),
        ObservableKind::G2 { alpha } => Ok(1.0 / (alpha * d)),
        ObservableKind::G3 { alpha, .. } => Ok(-1.0 / (alpha * d)),
        ObservableKind::MinDistance => Err(TheoryError::UnsupportedObservable),
    }
}

/// Dispatch on the density case.
pub fn predict(obs: &ObservableDef, case: DensityCase, m: u64) -> Result<TheoryPrediction, TheoryError> {
    match case {
        DensityCase::Uniform => predict_uniform(obs, m),
        DensityCase::Arcsine => predict_arcsine(obs, m),
    }
}

/// Predictions for a uniform invariant density on `[0,1]^d`, with `d` read
/// from the observable's target point.
pub fn predict_uniform(obs: &ObservableDef, m: u64) -> Result<TheoryPrediction, TheoryError> {
    if m == 0 {
        return Err(TheoryError::BlockSizeTooSmall { m, min: 1 });
    }
    let d = obs.zeta().dim();
    let df = d as f64;
    let m_omega = m as f64 * omega(d);
    let xi = shape_for(obs.kind(), df)?;
    Ok(match obs.kind() {
        ObservableKind::G1 => {
            let b = m_omega.ln() / df;
            TheoryPrediction {
                a_m: df,
                b_m: b,
                sigma_pred: 1.0 / df,
                mu_pred: b,
                xi_pred: xi,
                slope_log_mu_vs_log_n: None,
                slope_log_sigma_vs_log_n: Some(0.0),
                slope_mu_vs_ln_n: Some(-1.0 / df),
            }
        }
        ObservableKind::G2 { alpha } => {
            let ad = alpha * df;
            let gamma = m_omega.powf(1.0 / ad);
            let sigma = gamma / ad;
            TheoryPrediction {
                a_m: 1.0 / sigma,
                b_m: gamma,
                sigma_pred: sigma,
                mu_pred: gamma,
                xi_pred: xi,
                slope_log_mu_vs_log_n: Some(-1.0 / ad),
                slope_log_sigma_vs_log_n: Some(-1.0 / ad),
                slope_mu_vs_ln_n: None,
            }
        }
        ObservableKind::G3 { alpha, cap } => {
            let ad = alpha * df;
            let deficit = m_omega.powf(-1.0 / ad);
            let sigma = deficit / ad;
            TheoryPrediction {
                a_m: 1.0 / sigma,
                b_m: cap,
                sigma_pred: sigma,
                mu_pred: cap,
                xi_pred: xi,
                slope_log_mu_vs_log_n: Some(0.0),
                slope_log_sigma_vs_log_n: Some(1.0 / ad),
                slope_mu_vs_ln_n: None,
            }
        }
        ObservableKind::MinDistance => return Err(TheoryError::UnsupportedObservable),
    })
}

/// Predictions for the arcsine density of the full quadratic map. The
/// target must be one-dimensional and sit inside the validity band; the
/// block size must reach the asymptotic regime.
pub fn predict_arcsine(obs: &ObservableDef, m: u64) -> Result<TheoryPrediction, TheoryError> {
    let zeta = arcsine_target(obs)?;
    if m < 10 {
        return Err(TheoryError::BlockSizeTooSmall { m, min: 10 });
    }
    let xi = shape_for(obs.kind(), 1.0)?;
    let rho = arcsine_density(zeta)?;
    let two_m_rho = 2.0 * m as f64 * rho;
    Ok(match obs.kind() {
        ObservableKind::G1 => {
            let mu = (m as f64).ln() + (2.0 * rho).ln();
            let p = quadratic_correction_coefficient(zeta)?;
            let mf = m as f64;
            let sigma =
                1.0 + 2.0 / 3.0 * PI * PI / (4.0 * mf * mf) * zeta * (zeta - 1.0) * p;
            TheoryPrediction {
                a_m: 1.0 / sigma,
                b_m: mu,
                sigma_pred: sigma,
                mu_pred: mu,
                xi_pred: xi,
                slope_log_mu_vs_log_n: None,
                slope_log_sigma_vs_log_n: Some(0.0),
                slope_mu_vs_ln_n: Some(-1.0),
            }
        }
        ObservableKind::G2 { alpha } => {
            let gamma = two_m_rho.powf(1.0 / alpha) / alpha;
            TheoryPrediction {
                a_m: 1.0 / gamma,
                b_m: alpha * gamma,
                sigma_pred: gamma,
                mu_pred: alpha * gamma,
                xi_pred: xi,
                slope_log_mu_vs_log_n: Some(-1.0 / alpha),
                slope_log_sigma_vs_log_n: Some(-1.0 / alpha),
                slope_mu_vs_ln_n: None,
            }
        }
        ObservableKind::G3 { alpha, cap } => {
            let deficit = two_m_rho.powf(-1.0 / alpha) / alpha;
            TheoryPrediction {
                a_m: 1.0 / deficit,
                b_m: cap,
                sigma_pred: deficit,
                mu_pred: cap,
                xi_pred: xi,
                slope_log_mu_vs_log_n: Some(0.0),
                slope_log_sigma_vs_log_n: Some(1.0 / alpha),
                slope_mu_vs_ln_n: None,
            }
        }
        ObservableKind::MinDistance => return Err(TheoryError::UnsupportedObservable),
    })
}

fn arcsine_target(obs: &ObservableDef) -> Result<f64, TheoryError> {
    let zeta_point: Point = obs.zeta();
    if zeta_point.dim() != 1 {
        return Err(TheoryError::DimensionMismatch { expected: 1, got: zeta_point.dim() });
    }
    let zeta = zeta_point.x();
    if !(zeta > VALIDITY_BAND && zeta < 1.0 - VALIDITY_BAND) {
        return Err(TheoryError::OutsideValidityBand(zeta));
    }
    Ok(zeta)
}

/// Tail quantile `gamma_m`, mean excess `G(gamma_m)`, and right endpoint
/// for the given observable and density case.
pub fn gnedenko_context(
    obs: &ObservableDef,
    case: DensityCase,
    m: u64,
) -> Result<GnedenkoContext, TheoryError> {
    match case {
        DensityCase::Uniform => {
            if m == 0 {
                return Err(TheoryError::BlockSizeTooSmall { m, min: 1 });
            }
            let d = obs.zeta().dim();
            let df = d as f64;
            let m_omega = m as f64 * omega(d);
            match obs.kind() {
                ObservableKind::G1 => Ok(GnedenkoContext {
                    gamma_m: m_omega.ln() / df,
                    g_t: 1.0 / df,
                    u_f: f64::INFINITY,
                }),
                ObservableKind::G2 { alpha } => {
                    let ad = alpha * df;
                    let gamma = m_omega.powf(1.0 / ad);
                    let g_t = if ad > 1.0 { gamma / (ad - 1.0) } else { f64::INFINITY };
                    Ok(GnedenkoContext { gamma_m: gamma, g_t, u_f: f64::INFINITY })
                }
                ObservableKind::G3 { alpha, cap } => {
                    let ad = alpha * df;
                    let deficit = m_omega.powf(-1.0 / ad);
                    Ok(GnedenkoContext {
                        gamma_m: cap - deficit,
                        g_t: deficit / (ad + 1.0),
                        u_f: cap,
                    })
                }
                ObservableKind::MinDistance => Err(TheoryError::UnsupportedObservable),
            }
        }
        DensityCase::Arcsine => {
            let zeta = arcsine_target(obs)?;
            if m < 10 {
                return Err(TheoryError::BlockSizeTooSmall { m, min: 10 });
            }
            let rho = arcsine_density(zeta)?;
            let two_m_rho = 2.0 * m as f64 * rho;
            match obs.kind() {
                ObservableKind::G1 => {
                    let gamma = two_m_rho.ln();
                    let p = quadratic_correction_coefficient(zeta)?;
                    let g_t = 1.0 - 2.0 / 3.0 * (-2.0 * gamma).exp() * p;
                    Ok(GnedenkoContext { gamma_m: gamma, g_t, u_f: f64::INFINITY })
                }
                ObservableKind::G2 { alpha } => {
                    let gamma = two_m_rho.powf(1.0 / alpha) / alpha;
                    let g_t = if alpha > 1.0 { gamma / (alpha - 1.0) } else { f64::INFINITY };
                    Ok(GnedenkoContext { gamma_m: gamma, g_t, u_f: f64::INFINITY })
                }
                ObservableKind::G3 { alpha, cap } => {
                    let deficit = two_m_rho.powf(-1.0 / alpha) / alpha;
                    Ok(GnedenkoContext {
                        gamma_m: cap - deficit,
                        g_t: deficit / (alpha + 1.0),
                        u_f: cap,
                    })
                }
                ObservableKind::MinDistance => Err(TheoryError::UnsupportedObservable),
            }
        }
    }
}

/// Closed-form upper-tail probability `1 - F(u)` of the observable
/// distribution in the given density case, using the same conventions as
/// [`gnedenko_context`], so that `tail_probability(gamma_m) = 1/m` exactly.
/// Valid in the upper tail; values are clamped to `[0, 1]`.
pub fn tail_probability(
    obs: &ObservableDef,
    case: DensityCase,
    u: f64,
) -> Result<f64, TheoryError> {
    let raw = match case {
        DensityCase::Uniform => {
            let d = obs.zeta().dim();
            let df = d as f64;
            let om = omega(d);
            match obs.kind() {
                ObservableKind::G1 => om * (-u * df).exp(),
                ObservableKind::G2 { alpha } => {
                    if u <= 0.0 {
                        return Ok(1.0);
                    }
                    om * u.powf(-alpha * df)
                }
                ObservableKind::G3 { alpha, cap } => {
                    if u >= cap {
                        return Ok(0.0);
                    }
                    om * (cap - u).powf(alpha * df)
                }
                ObservableKind::MinDistance => return Err(TheoryError::UnsupportedObservable),
            }
        }
        DensityCase::Arcsine => {
            let zeta = arcsine_target(obs)?;
            let two_rho = 2.0 * arcsine_density(zeta)?;
            match obs.kind() {
                ObservableKind::G1 => two_rho * (-u).exp(),
                ObservableKind::G2 { alpha } => {
                    if u <= 0.0 {
                        return Ok(1.0);
                    }
                    two_rho * (alpha * u).powf(-alpha)
                }
                ObservableKind::G3 { alpha, cap } => {
                    if u >= cap {
                        return Ok(0.0);
                    }
                    two_rho * (alpha * (cap - u)).powf(alpha)
                }
                ObservableKind::MinDistance => return Err(TheoryError::UnsupportedObservable),
            }
        }
    };
    Ok(raw.clamp(0.0, 1.0))
}
