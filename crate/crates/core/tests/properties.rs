//! Randomized invariants of the pipeline primitives.
//!
//! Each property states an exact algebraic identity (duality, equivariance,
//! conservation) or a tight numerical bound that must hold for arbitrary
//! inputs, not just the frozen examples in the unit tests.

use evtlab_core::blockmax::{block_extrema, ExtremumMode};
use evtlab_core::gev::GevParams;
use evtlab_core::stats::{histogram, ks_statistic};
use proptest::collection::vec as pvec;
use proptest::prelude::*;

fn finite_series() -> impl Strategy<Value = Vec<f64>> {
    pvec(-1.0e6f64..1.0e6, 1..200)
}

fn gev_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-5.0f64..5.0, 0.05f64..20.0, -0.9f64..2.0)
}

proptest! {
    #[test]
    fn quantile_inverts_the_cdf((mu, sigma, xi) in gev_params(), p in 0.001f64..0.999) {
        let g = GevParams::new(mu, sigma, xi).unwrap();
        let x = g.quantile(p).unwrap();
        prop_assert!((g.cdf(x) - p).abs() < 1e-9, "p={p} roundtrip={}", g.cdf(x));
    }

    #[test]
    fn cdf_is_monotone((mu, sigma, xi) in gev_params(), a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let g = GevParams::new(mu, sigma, xi).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(g.cdf(lo) <= g.cdf(hi));
    }

    #[test]
    fn block_minima_are_dual_to_maxima_of_the_negated_series(series in finite_series(), n in 1usize..20) {
        prop_assume!(n <= series.len());
        let maxima = block_extrema(series.iter().copied(), n, ExtremumMode::Max).unwrap();
        let negated: Vec<f64> = series.iter().map(|v| -v).collect();
        let minima = block_extrema(negated, n, ExtremumMode::Min).unwrap();
        for (hi, lo) in maxima.values.iter().zip(&minima.values) {
            prop_assert_eq!(*hi, -*lo);
        }
    }

    #[test]
    fn block_extrema_commute_with_increasing_affine_maps(
        series in finite_series(),
        n in 1usize..20,
        a in 0.25f64..4.0,
        b in -10.0f64..10.0,
    ) {
        prop_assume!(n <= series.len());
        let direct = block_extrema(series.iter().copied(), n, ExtremumMode::Max).unwrap();
        let mapped: Vec<f64> = series.iter().map(|v| a * v + b).collect();
        let through = block_extrema(mapped, n, ExtremumMode::Max).unwrap();
        for (x, y) in direct.values.iter().zip(&through.values) {
            prop_assert_eq!(a * x + b, *y);
        }
    }

    #[test]
    fn block_extrema_ignore_order_within_blocks(series in finite_series(), n in 1usize..20) {
        prop_assume!(n <= series.len());
        let forward = block_extrema(series.iter().copied(), n, ExtremumMode::Max).unwrap();
        // reverse each block in place; the block multisets are unchanged
        let m = series.len() / n;
        let mut shuffled: Vec<f64> = series[..n * m].to_vec();
        for chunk in shuffled.chunks_mut(m) {
            chunk.reverse();
        }
        let reversed = block_extrema(shuffled, n, ExtremumMode::Max).unwrap();
        prop_assert_eq!(forward.values, reversed.values);
    }

    #[test]
    fn ks_distance_is_invariant_under_the_probability_transform(
        data in pvec(-20.0f64..20.0, 1..150),
        (mu, sigma, xi) in gev_params(),
    ) {
        // mapping the data through the null cdf and comparing against the
        // uniform cdf must leave the statistic unchanged
        let g = GevParams::new(mu, sigma, xi).unwrap();
        let d_raw = ks_statistic(&data, |x| g.cdf(x)).unwrap();
        let pit: Vec<f64> = data.iter().map(|&x| g.cdf(x)).collect();
        let d_pit = ks_statistic(&pit, |u| u.clamp(0.0, 1.0)).unwrap();
        prop_assert!((d_raw - d_pit).abs() <= 1e-12, "{d_raw} vs {d_pit}");
    }

    #[test]
    fn histogram_counts_every_in_range_point_once(
        data in pvec(-3.0f64..3.0, 0..300),
        bins in 1usize..40,
    ) {
        let (lo, hi) = (-1.0, 2.0);
        let h = histogram(&data, bins, lo, hi).unwrap();
        let expected = data.iter().filter(|&&x| x >= lo && x <= hi).count() as u64;
        prop_assert_eq!(h.total(), expected);
        prop_assert_eq!(h.counts().len(), bins);
    }
}
