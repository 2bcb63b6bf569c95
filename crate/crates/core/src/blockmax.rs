//! Block extrema extraction.
//!
//! A series of length `k` is partitioned into `n` consecutive blocks of
//! length `m = floor(k/n)`; any trailing remainder is discarded. Each block
//! contributes its maximum (or minimum), giving the sample to which the
//! extreme value distribution is fitted. The linear normalization
//! `y = a_m (x - b_m)` maps raw extrema onto the standard limit family.

use alloc::vec::Vec;
use core::fmt;

/// Which extremum each block contributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumMode {
    Max,
    Min,
}

/// Errors from block partitioning and normalization.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockError {
    /// `n = 0` requested.
    ZeroBlocks,
    /// More blocks than series values (`m` would be zero).
    BlockCountExceedsLength { n: usize, k: usize },
    /// Normalizing scale must be positive and finite.
    InvalidScale,
    /// Normalizing shift must be finite.
    InvalidShift,
}

impl fmt::Display for BlockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockError::ZeroBlocks => write!(f, "block count must be at least 1"),
            BlockError::BlockCountExceedsLength { n, k } => {
                write!(f, "cannot split {k} values into {n} non-empty blocks")
            }
            BlockError::InvalidScale => write!(f, "normalizing scale a_m must be positive and finite"),
            BlockError::InvalidShift => write!(f, "normalizing shift b_m must be finite"),
        }
    }
}

impl core::error::Error for BlockError {}

/// The extracted block extrema: `values.len() == n`, each over a block of
/// `m` series entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremaSample {
    pub values: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub mode: ExtremumMode,
}

/// Stream the series into `n` block extrema of length `m = floor(k/n)`.
/// The series is consumed once; memory is `O(n)`.
pub fn block_extrema<I>(series: I, n: usize, mode: ExtremumMode) -> Result<ExtremaSample, BlockError>
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: ExactSizeIterator,
{
    let mut iter = series.into_iter();
    let k = iter.len();
    if n == 0 {
        return Err(BlockError::ZeroBlocks);
    }
    if n > k {
        return Err(BlockError::BlockCountExceedsLength { n, k });
    }
    let m = k / n;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let mut acc = match iter.next() {
            Some(v) => v,
            None => return Err(BlockError::BlockCountExceedsLength { n, k }),
        };
        for _ in 1..m {
            let v = match iter.next() {
                Some(v) => v,
                None => return Err(BlockError::BlockCountExceedsLength { n, k }),
            };
            acc = match mode {
                ExtremumMode::Max => acc.max(v),
                ExtremumMode::Min => acc.min(v),
            };
        }
        values.push(acc);
    }
    Ok(ExtremaSample { values, n, m, mode })
}

/// Apply `y = a_m (x - b_m)` to every extremum.
pub fn normalize(sample: &ExtremaSample, a_m: f64, b_m: f64) -> Result<ExtremaSample, BlockError> {
    if !(a_m > 0.0) || !a_m.is_finite() {
        return Err(BlockError::InvalidScale);
    }
    if !b_m.is_finite() {
        return Err(BlockError::InvalidShift);
    }
    Ok(ExtremaSample {
        values: sample.values.iter().map(|&x| a_m * (x - b_m)).collect(),
        n: sample.n,
        m: sample.m,
        mode: sample.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn maxima_of_two_blocks() {
        let s = block_extrema(vec![1.0, 5.0, 2.0, 4.0, 3.0, 6.0], 2, ExtremumMode::Max).unwrap();
        assert_eq!(s.values, vec![5.0, 6.0]);
        assert_eq!((s.n, s.m), (2, 3));
    }

    #[test]
    fn minima_of_three_blocks() {
        let s = block_extrema(vec![1.0, 5.0, 2.0, 4.0, 3.0, 6.0], 3, ExtremumMode::Min).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        assert_eq!((s.n, s.m), (3, 2));
    }

    #[test]
    fn trailing_remainder_is_discarded() {
        let s = block_extrema(vec![1.0, 5.0, 2.0, 4.0, 3.0, 6.0, 99.0], 2, ExtremumMode::Max).unwrap();
        assert_eq!(s.values, vec![5.0, 6.0]);
        assert_eq!(s.m, 3);
    }

    #[test]
    fn single_block_returns_the_global_extremum() {
        let s = block_extrema(vec![3.0, 1.0, 2.0], 1, ExtremumMode::Max).unwrap();
        assert_eq!(s.values, vec![3.0]);
    }

    #[test]
    fn block_length_one_is_the_identity() {
        let s = block_extrema(vec![3.0, 1.0, 2.0], 3, ExtremumMode::Min).unwrap();
        assert_eq!(s.values, vec![3.0, 1.0, 2.0]);
        assert_eq!(s.m, 1);
    }

    #[test]
    fn errors_on_degenerate_partitions() {
        assert_eq!(
            block_extrema(vec![1.0, 2.0], 0, ExtremumMode::Max).unwrap_err(),
            BlockError::ZeroBlocks
        );
        assert_eq!(
            block_extrema(vec![1.0, 2.0], 3, ExtremumMode::Max).unwrap_err(),
            BlockError::BlockCountExceedsLength { n: 3, k: 2 }
        );
    }

    #[test]
    fn normalize_applies_the_affine_map() {
        let s = block_extrema(vec![1.0, 2.0, 3.0], 3, ExtremumMode::Max).unwrap();
        let y = normalize(&s, 2.0, 1.0).unwrap();
        assert_eq!(y.values, vec![0.0, 2.0, 4.0]);
        assert_eq!((y.n, y.m), (s.n, s.m));
    }

    #[test]
    fn normalize_rejects_bad_sequences() {
        let s = block_extrema(vec![1.0, 2.0], 2, ExtremumMode::Max).unwrap();
        assert_eq!(normalize(&s, 0.0, 0.0).unwrap_err(), BlockError::InvalidScale);
        assert_eq!(normalize(&s, -1.0, 0.0).unwrap_err(), BlockError::InvalidScale);
        assert_eq!(normalize(&s, 1.0, f64::NAN).unwrap_err(), BlockError::InvalidShift);
    }
}
