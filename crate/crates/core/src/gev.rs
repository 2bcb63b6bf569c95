//! Generalized extreme value distribution: density, distribution function,
//! quantiles, sampling, and maximum-likelihood fitting.
//!
//! The three-parameter family is written in the von Mises form
//!
//! ```text
//! F(x; mu, sigma, xi) = exp{ -[1 + xi (x - mu)/sigma]^(-1/xi) }
//! ```
//!
//! on the support `1 + xi (x - mu)/sigma > 0`, with the Gumbel branch
//! `exp(-e^(-(x - mu)/sigma))` taken whenever `|xi|` falls below
//! [`GUMBEL_SWITCH`]. `xi > 0` is the Frechet (heavy upper tail) regime,
//! `xi < 0` the Weibull (finite upper endpoint) regime.
//!
//! Fitting minimises the negative log likelihood over `(mu, ln sigma, xi)`
//! with a Nelder-Mead simplex started from probability-weighted-moment
//! (L-moment) estimates, plus three deterministically jittered restarts.
//! Confidence intervals come from the observed information matrix: a central
//! finite-difference Hessian of the negative log likelihood at the optimum,
//! inverted through a Cholesky factorisation, giving the usual
//! `+-1.96 stderr` normal approximation.

mod simplex;

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // as a trait import: std builds resolve these methods inherently
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape magnitudes below this are evaluated on the Gumbel branch.
pub const GUMBEL_SWITCH: f64 = 1e-6;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN2_OVER_LN3: f64 = 0.630_929_753_571_457_4;
/// Fixed internal seed for the deterministic optimizer restarts.
const FIT_JITTER_SEED: u64 = 0x6765_765f_6669_745f;

/// Parameter-level validation errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GevError {
    /// Location must be finite.
    InvalidLocation(f64),
    /// Scale must be positive and finite.
    InvalidScale(f64),
    /// Shape must be finite.
    InvalidShape(f64),
    /// Quantile probabilities must lie strictly inside (0, 1).
    InvalidProbability(f64),
}

impl fmt::Display for GevError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GevError::InvalidLocation(v) => write!(f, "location must be finite, got {v}"),
            GevError::InvalidScale(v) => write!(f, "scale must be positive and finite, got {v}"),
            GevError::InvalidShape(v) => write!(f, "shape must be finite, got {v}"),
            GevError::InvalidProbability(v) => {
                write!(f, "probability must lie strictly in (0,1), got {v}")
            }
        }
    }
}

impl core::error::Error for GevError {}

/// Errors from [`fit_mle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitError {
    /// Input contains NaN or infinities.
    NonFiniteData,
    /// All observations identical; the scale degenerates to zero.
    DegenerateData,
    /// Fewer than 10 distinct values cannot pin down three parameters.
    TooFewDistinct { distinct: usize },
    /// The optimizer failed to produce admissible parameters.
    OptimizerFailed,
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::NonFiniteData => write!(f, "data must be finite"),
            FitError::DegenerateData => write!(f, "all observations are identical"),
            FitError::TooFewDistinct { distinct } => {
                write!(f, "need at least 10 distinct values, got {distinct}")
            }
            FitError::OptimizerFailed => write!(f, "optimizer returned inadmissible parameters"),
        }
    }
}

impl core::error::Error for FitError {}

/// Location/scale/shape triple, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GevParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GevParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self, GevError> {
        if !mu.is_finite() {
            return Err(GevError::InvalidLocation(mu));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(GevError::InvalidScale(sigma));
        }
        if !xi.is_finite() {
            return Err(GevError::InvalidShape(xi));
        }
        Ok(GevParams { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Whether `x` lies in the open support of the density.
    pub fn support_contains(&self, x: f64) -> bool {
        if self.xi.abs() < GUMBEL_SWITCH {
            true
        } else {
            1.0 + self.xi * (x - self.mu) / self.sigma > 0.0
        }
    }

    /// Distribution function; continuous extension 0 or 1 off-support.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        if self.xi.abs() < GUMBEL_SWITCH {
            (-((-z).exp())).exp()
        } else {
            let a = self.xi * z;
            if a <= -1.0 {
                return if self.xi > 0.0 { 0.0 } else { 1.0 };
            }
            // (1 + xi z)^(-1/xi) via log1p for small-shape stability
            (-((-a.ln_1p() / self.xi).exp())).exp()
        }
    }

    /// Density; zero off-support.
    pub fn pdf(&self, x: f64) -> f64 {
        let lp = self.ln_pdf(x);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            lp.exp()
        }
    }

    /// Log density; `-inf` off-support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        if self.xi.abs() < GUMBEL_SWITCH {
            -self.sigma.ln() - z - (-z).exp()
        } else {
            let a = self.xi * z;
            if a <= -1.0 {
                return f64::NEG_INFINITY;
            }
            let w = a.ln_1p(); // ln(1 + xi z)
            let tpow = (-w / self.xi).exp(); // (1 + xi z)^(-1/xi)
            -self.sigma.ln() - (1.0 + 1.0 / self.xi) * w - tpow
        }
    }

    /// Quantile function on `p` strictly inside `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64, GevError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(GevError::InvalidProbability(p));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        let ll = -p.ln(); // -ln p, positive
        if self.xi.abs() < GUMBEL_SWITCH {
            self.mu - self.sigma * ll.ln()
        } else {
            // ((-ln p)^(-xi) - 1) / xi, with expm1 guarding small shapes
            self.mu + self.sigma * (-self.xi * ll.ln()).exp_m1() / self.xi
        }
    }

    /// Log likelihood of a sample; `-inf` if any point leaves the support.
    pub fn loglik(&self, data: &[f64]) -> f64 {
        -nll(data, self.mu, self.sigma, self.xi)
    }

    /// Draw `count` values through quantile inversion of a seeded ChaCha
    /// stream. Identical `(count, seed)` always reproduces the sample.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, count)
    }

    /// Same inversion scheme with a caller-managed generator, for stream
    /// or counter-based parallel schemes.
    pub fn sample_with<R: RngCore>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    fn draw<R: RngCore>(&self, rng: &mut R) -> f64 {
        // uniform on (0,1): a zero draw (probability 2^-53) is redrawn
        let mut u: f64 = rng.gen();
        while u <= 0.0 {
            u = rng.gen();
        }
        self.quantile_unchecked(u)
    }
}

/// Negative log likelihood; `+inf` encodes support violations so direct
/// search optimizers are repelled from inadmissible regions.
fn nll(data: &[f64], mu: f64, sigma: f64, xi: f64) -> f64 {
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() || !xi.is_finite() {
        return f64::INFINITY;
    }
    let n = data.len() as f64;
    let ln_sigma = sigma.ln();
    if xi.abs() < GUMBEL_SWITCH {
        let mut sum_z = 0.0;
        let mut sum_e = 0.0;
        for &x in data {
            let z = (x - mu) / sigma;
            sum_z += z;
            sum_e += (-z).exp();
        }
        n * ln_sigma + sum_z + sum_e
    } else {
        let mut sum_w = 0.0;
        let mut sum_t = 0.0;
        for &x in data {
            let a = xi * (x - mu) / sigma;
            if a <= -1.0 {
                return f64::INFINITY;
            }
            let w = a.ln_1p();
            sum_w += w;
            sum_t += (-w / xi).exp();
        }
        n * ln_sigma + (1.0 + 1.0 / xi) * sum_w + sum_t
    }
}

/// Two-sided 95% interval.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    fn unbounded() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }
}

/// Maximum-likelihood fit with observed-information confidence intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub params: GevParams,
    pub mu_ci: Interval,
    pub sigma_ci: Interval,
    pub xi_ci: Interval,
    pub loglik: f64,
    /// Simplex met its diameter tolerance and the observed information was
    /// positive definite. Parameters are reported either way.
    pub converged: bool,
    pub n_data: usize,
}

/// Probability-weighted-moment (L-moment) parameter estimate, used to start
/// the likelihood optimizer; falls back to Gumbel moment matching when the
/// sample geometry defeats the PWM formulas.
pub fn lmoment_init(data: &[f64]) -> Result<GevParams, FitError> {
    if data.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonFiniteData);
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    check_distinct(&sorted)?;
    Ok(lmoment_init_sorted(&sorted))
}

fn check_distinct(sorted: &[f64]) -> Result<(), FitError> {
    let mut distinct = if sorted.is_empty() { 0 } else { 1 };
    for w in sorted.windows(2) {
        if w[1] > w[0] {
            distinct += 1;
        }
    }
    if !sorted.is_empty() && distinct == 1 {
        return Err(FitError::DegenerateData);
    }
    if distinct < 10 {
        return Err(FitError::TooFewDistinct { distinct });
    }
    Ok(())
}

fn moment_fallback(sorted: &[f64]) -> GevParams {
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt().max(f64::MIN_POSITIVE);
    let sigma = sd * 6.0f64.sqrt() / core::f64::consts::PI;
    GevParams { mu: mean - EULER_GAMMA * sigma, sigma, xi: 0.0 }
}

fn lmoment_init_sorted(sorted: &[f64]) -> GevParams {
    let n = sorted.len() as f64;
    let mut b0 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let r = i as f64;
        b0 += v;
        b1 += r / (n - 1.0) * v;
        b2 += r * (r - 1.0) / ((n - 1.0) * (n - 2.0)) * v;
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    let l1 = b0;
    let l2 = 2.0 * b1 - b0;
    let l3 = 6.0 * b2 - 6.0 * b1 + b0;
    if !(l2 > 0.0) || !l2.is_finite() {
        return moment_fallback(sorted);
    }
    let t3 = l3 / l2;
    let c = 2.0 / (3.0 + t3) - LN2_OVER_LN3;
    // Hosking's rational approximation; his k is -xi
    let kh = 7.8590 * c + 2.9554 * c * c;
    let params = if kh.abs() < 1e-8 {
        let sigma = l2 / core::f64::consts::LN_2;
        GevParams { mu: l1 - EULER_GAMMA * sigma, sigma, xi: 0.0 }
    } else {
        let g = libm::tgamma(1.0 + kh);
        if !g.is_finite() || g <= 0.0 {
            return moment_fallback(sorted);
        }
        let denom = (1.0 - 2.0f64.powf(-kh)) * g;
        if denom == 0.0 || !denom.is_finite() {
            return moment_fallback(sorted);
        }
        let sigma = l2 * kh / denom;
        let mu = l1 - sigma * (1.0 - g) / kh;
        let xi = (-kh).clamp(-0.9, 0.9);
        GevParams { mu, sigma, xi }
    };
    if params.mu.is_finite() && params.sigma > 0.0 && params.sigma.is_finite() {
        params
    } else {
        moment_fallback(sorted)
    }
}

/// Fit by maximum likelihood. Deterministic for fixed input: the restart
/// jitter runs off a fixed internal seed.
pub fn fit_mle(data: &[f64]) -> Result<FitResult, FitError> {
    if data.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonFiniteData);
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    check_distinct(&sorted)?;
    let start = lmoment_init_sorted(&sorted);

    let objective = |th: &[f64; 3]| {
        if !(-700.0..=700.0).contains(&th[1]) {
            return f64::INFINITY;
        }
        nll(data, th[0], th[1].exp(), th[2])
    };
    let opts = simplex::Options::default();
    let mut best = simplex::minimize(objective, [start.mu, start.sigma.ln(), start.xi], opts);
    let mut rng = ChaCha8Rng::seed_from_u64(FIT_JITTER_SEED);
    for _ in 0..3 {
        let mut jittered = best.x;
        for slot in jittered.iter_mut() {
            let scale = slot.abs().max(1.0);
            let u: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            *slot += 0.1 * scale * u;
        }
        let out = simplex::minimize(objective, jittered, opts);
        if out.fx < best.fx {
            best = out;
        }
    }

    let params = GevParams::new(best.x[0], best.x[1].exp(), best.x[2])
        .map_err(|_| FitError::OptimizerFailed)?;
    let loglik = -best.fx;

    let variances = observed_information_variances(data, &params);
    let (cis, information_ok) = match variances {
        Some(v) => {
            let ci = |estimate: f64, var: f64| {
                let half = 1.96 * var.sqrt();
                Interval { lo: estimate - half, hi: estimate + half }
            };
            (
                [ci(params.mu, v[0]), ci(params.sigma, v[1]), ci(params.xi, v[2])],
                true,
            )
        }
        None => ([Interval::unbounded(); 3], false),
    };

    Ok(FitResult {
        params,
        mu_ci: cis[0],
        sigma_ci: cis[1],
        xi_ci: cis[2],
        loglik,
        converged: best.converged && information_ok && loglik.is_finite(),
        n_data: data.len(),
    })
}

/// Diagonal of the inverse observed information (parameter variances) in the
/// natural `(mu, sigma, xi)` coordinates, or `None` when the
/// finite-difference Hessian is unusable or not positive definite.
fn observed_information_variances(data: &[f64], params: &GevParams) -> Option<[f64; 3]> {
    let th = [params.mu, params.sigma, params.xi];
    let f = |t: &[f64; 3]| nll(data, t[0], t[1], t[2]);
    let step: [f64; 3] = core::array::from_fn(|i| 1e-4 * th[i].abs().max(1.0));

    let f0 = f(&th);
    if !f0.is_finite() {
        return None;
    }
    let mut h = [[0.0f64; 3]; 3];
    for i in 0..3 {
        let mut tp = th;
        let mut tm = th;
        tp[i] += step[i];
        tm[i] -= step[i];
        let (fp, fm) = (f(&tp), f(&tm));
        if !fp.is_finite() || !fm.is_finite() {
            return None;
        }
        h[i][i] = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut tpp = th;
            let mut tpm = th;
            let mut tmp = th;
            let mut tmm = th;
            tpp[i] += step[i];
            tpp[j] += step[j];
            tpm[i] += step[i];
            tpm[j] -= step[j];
            tmp[i] -= step[i];
            tmp[j] += step[j];
            tmm[i] -= step[i];
            tmm[j] -= step[j];
            let (fpp, fpm, fmp, fmm) = (f(&tpp), f(&tpm), f(&tmp), f(&tmm));
            if ![fpp, fpm, fmp, fmm].iter().all(|v| v.is_finite()) {
                return None;
            }
            let v = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    spd_inverse_diagonal(&h)
}

/// Cholesky-based inversion of a symmetric 3x3 matrix; returns the inverse's
/// diagonal, or `None` if the matrix is not positive definite.
fn spd_inverse_diagonal(h: &[[f64; 3]; 3]) -> Option<[f64; 3]> {
    // H = L L^T
    if !(h[0][0] > 0.0) {
        return None;
    }
    let l00 = h[0][0].sqrt();
    let l10 = h[1][0] / l00;
    let d1 = h[1][1] - l10 * l10;
    if !(d1 > 0.0) {
        return None;
    }
    let l11 = d1.sqrt();
    let l20 = h[2][0] / l00;
    let l21 = (h[2][1] - l20 * l10) / l11;
    let d2 = h[2][2] - l20 * l20 - l21 * l21;
    if !(d2 > 0.0) {
        return None;
    }
    let l22 = d2.sqrt();

    // M = L^-1 (lower triangular); H^-1 = M^T M, so (H^-1)_ii = sum_k M_ki^2
    let m00 = 1.0 / l00;
    let m11 = 1.0 / l11;
    let m22 = 1.0 / l22;
    let m10 = -l10 * m00 / l11;
    let m20 = (-l20 * m00 - l21 * m10) / l22;
    let m21 = -l21 * m11 / l22;

    let out = [
        m00 * m00 + m10 * m10 + m20 * m20,
        m11 * m11 + m21 * m21,
        m22 * m22,
    ];
    if out.iter().all(|v| v.is_finite() && *v > 0.0) {
        Some(out)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gumbel01() -> GevParams {
        GevParams::new(0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn parameter_validation_is_per_field() {
        assert!(matches!(
            GevParams::new(f64::NAN, 1.0, 0.0).unwrap_err(),
            GevError::InvalidLocation(_)
        ));
        assert_eq!(GevParams::new(0.0, 0.0, 0.0).unwrap_err(), GevError::InvalidScale(0.0));
        assert_eq!(GevParams::new(0.0, -1.0, 0.0).unwrap_err(), GevError::InvalidScale(-1.0));
        assert!(matches!(
            GevParams::new(0.0, 1.0, f64::INFINITY).unwrap_err(),
            GevError::InvalidShape(_)
        ));
    }

    #[test]
    fn cdf_frozen_values() {
        // Gumbel at the location: exp(-1)
        assert!((gumbel01().cdf(0.0) - 0.36787944117144233).abs() < 1e-15);
        // xi = 1 at x = 1: exp(-1/2)
        let frechet = GevParams::new(0.0, 1.0, 1.0).unwrap();
        assert!((frechet.cdf(1.0) - 0.6065306597126334).abs() < 1e-15);
        // xi = -0.5: upper endpoint at mu + sigma/|xi| = 2
        let weibull = GevParams::new(0.0, 1.0, -0.5).unwrap();
        assert_eq!(weibull.cdf(3.0), 1.0);
        assert_eq!(frechet.cdf(-2.0), 0.0);
    }

    #[test]
    fn support_tracks_the_shape_sign() {
        let frechet = GevParams::new(0.0, 1.0, 0.5).unwrap();
        assert!(!frechet.support_contains(-2.5));
        assert!(frechet.support_contains(5.0));
        let weibull = GevParams::new(0.0, 1.0, -0.5).unwrap();
        assert!(weibull.support_contains(1.9));
        assert!(!weibull.support_contains(2.1));
        assert!(gumbel01().support_contains(-1e6));
    }

    #[test]
    fn pdf_frozen_values_and_off_support_zero() {
        assert!((gumbel01().pdf(0.0) - 0.36787944117144233).abs() < 1e-15);
        let weibull = GevParams::new(0.0, 1.0, -0.5).unwrap();
        assert_eq!(weibull.pdf(2.5), 0.0);
        assert_eq!(weibull.ln_pdf(2.5), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_frozen_value_and_roundtrip() {
        let q = gumbel01().quantile(0.9).unwrap();
        assert!((q - 2.250367327312445).abs() < 1e-12);

        for xi in [-0.5, -0.3, 0.0, 0.3, 1.0] {
            let p = GevParams::new(0.7, 2.3, xi).unwrap();
            for prob in [0.01, 0.1, 0.5, 0.9, 0.99] {
                let x = p.quantile(prob).unwrap();
                assert!(
                    (p.cdf(x) - prob).abs() < 1e-12,
                    "roundtrip failed at xi={xi} p={prob}"
                );
            }
        }
    }

    #[test]
    fn quantile_rejects_boundary_probabilities() {
        for p in [0.0, 1.0, -0.1, 1.1, f64::NAN] {
            assert!(gumbel01().quantile(p).is_err());
        }
    }

    #[test]
    fn gumbel_switch_gives_identical_branch_below_threshold() {
        let a = GevParams::new(0.3, 1.7, 0.0).unwrap();
        let b = GevParams::new(0.3, 1.7, 1e-7).unwrap();
        for i in 0..101 {
            let x = 0.3 - 5.0 * 1.7 + i as f64 * 0.1 * 1.7;
            assert_eq!(a.cdf(x), b.cdf(x));
        }
    }

    #[test]
    fn loglik_sums_the_log_density() {
        let p = GevParams::new(0.1, 1.2, 0.2).unwrap();
        let data = vec![-0.5, 0.0, 0.3, 1.7, 4.2];
        let direct: f64 = data.iter().map(|&x| p.ln_pdf(x)).sum();
        assert!((p.loglik(&data) - direct).abs() < 1e-12);

        let weibull = GevParams::new(0.0, 1.0, -0.5).unwrap();
        assert_eq!(weibull.loglik(&[0.0, 3.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_support() {
        let p = GevParams::new(1.0, 0.5, -0.5).unwrap();
        let a = p.sample(1000, 42);
        let b = p.sample(1000, 42);
        assert_eq!(a, b);
        let endpoint = 1.0 + 0.5 / 0.5;
        assert!(a.iter().all(|&x| x < endpoint));

        let c = p.sample(1000, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn fit_recovers_a_clean_gumbel_quantile_sample() {
        let p = gumbel01();
        let data: Vec<f64> =
            (0..200).map(|i| p.quantile((i as f64 + 0.5) / 200.0).unwrap()).collect();
        let fit = fit_mle(&data).unwrap();
        assert!(fit.converged);
        assert!(fit.params.mu().abs() < 0.1, "mu = {}", fit.params.mu());
        assert!((fit.params.sigma() - 1.0).abs() < 0.1);
        assert!(fit.params.xi().abs() < 0.1);
        assert!(fit.loglik.is_finite());
        // the optimum cannot be worse than the truth
        assert!(fit.loglik >= p.loglik(&data) - 1e-6);
        // intervals contain their point estimates
        assert!(fit.mu_ci.contains(fit.params.mu()));
        assert!(fit.sigma_ci.contains(fit.params.sigma()));
        assert!(fit.xi_ci.contains(fit.params.xi()));
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        assert_eq!(fit_mle(&vec![3.3; 50]).unwrap_err(), FitError::DegenerateData);
        let nine: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert_eq!(fit_mle(&nine).unwrap_err(), FitError::TooFewDistinct { distinct: 9 });
        let mut repeated = vec![1.0, 2.0, 3.0];
        repeated.extend_from_slice(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert!(matches!(fit_mle(&repeated), Err(FitError::TooFewDistinct { distinct: 3 })));
        assert_eq!(fit_mle(&[1.0, f64::NAN]).unwrap_err(), FitError::NonFiniteData);
    }

    #[test]
    fn lmoment_init_lands_near_the_truth() {
        let p = GevParams::new(2.0, 0.7, 0.25).unwrap();
        let data: Vec<f64> =
            (0..500).map(|i| p.quantile((i as f64 + 0.5) / 500.0).unwrap()).collect();
        let init = lmoment_init(&data).unwrap();
        assert!((init.mu() - 2.0).abs() < 0.1);
        assert!((init.sigma() - 0.7).abs() < 0.1);
        assert!((init.xi() - 0.25).abs() < 0.1);
    }
}
