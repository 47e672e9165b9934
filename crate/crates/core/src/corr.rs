//! 2-D Pearson correlation coefficient.
//!
//! This is the single similarity measure used throughout the crate: as the
//! optimization cost (candidate speckle vs. target speckle) and as the
//! retrieval quality score (retrieved mask vs. ground-truth mask). The
//! coefficient is shape-independent, so inputs are consumed as flat
//! row-major sequences with a shape check up front.

use crate::error::{Error, Result};
use crate::pattern::{BinaryMask, SpecklePattern};

/// Anything that can be read as a real-valued 2-D pattern.
pub trait Real2d {
    fn shape(&self) -> (usize, usize);
    fn values(&self) -> impl Iterator<Item = f64> + '_;
}

impl Real2d for SpecklePattern {
    fn shape(&self) -> (usize, usize) {
        self.shape()
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values().iter().copied()
    }
}

impl Real2d for BinaryMask {
    fn shape(&self) -> (usize, usize) {
        self.shape()
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.bits().iter().map(|&b| f64::from(b))
    }
}

/// Borrowed view over a plain slice, for callers whose data lives outside
/// the pattern types.
#[derive(Debug, Clone, Copy)]
pub struct Real2dView<'a> {
    pub shape: (usize, usize),
    pub values: &'a [f64],
}

impl Real2d for Real2dView<'_> {
    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}

/// Pearson correlation of two equally shaped patterns:
/// `Σ(a−ā)(b−b̄) / sqrt(Σ(a−ā)² · Σ(b−b̄)²)`, always in [-1, 1] up to
/// rounding.
///
/// Constant input is an error rather than a silent 0: a silent value would
/// corrupt any ranking built on top of this function.
pub fn corr2<A: Real2d, B: Real2d>(a: &A, b: &B) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            got: b.shape(),
        });
    }
    let n = a.shape().0 * a.shape().1;
    if n < 2 {
        return Err(Error::InvalidValue(format!(
            "correlation needs at least 2 elements, got {n}"
        )));
    }

    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for (va, vb) in a.values().zip(b.values()) {
        sum_a += va;
        sum_b += vb;
    }
    let mean_a = sum_a / n as f64;
    let mean_b = sum_b / n as f64;

    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (va, vb) in a.values().zip(b.values()) {
        let da = va - mean_a;
        let db = vb - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }

    if var_a == 0.0 {
        return Err(Error::DegenerateVariance("first pattern is constant"));
    }
    if var_b == 0.0 {
        return Err(Error::DegenerateVariance("second pattern is constant"));
    }
    Ok(cov / (var_a * var_b).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(shape: (usize, usize), values: &[f64]) -> Real2dView<'_> {
        Real2dView { shape, values }
    }

    #[test]
    fn self_correlation_is_one() {
        let a = [1.0, 2.0, 3.0, 7.0];
        let r = corr2(&view((2, 2), &a), &view((2, 2), &a)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anticorrelation_is_minus_one() {
        let a = [1.0, 2.0, 3.0, 7.0];
        let b: Vec<f64> = a.iter().map(|v| 10.0 - v).collect();
        let r = corr2(&view((2, 2), &a), &view((2, 2), &b)).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_example() {
        // A = [[1,2],[3,4]], B = [[1,2],[3,5]]:
        // cov 6.5, variances 5 and 8.75 -> 6.5/sqrt(43.75).
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.0, 2.0, 3.0, 5.0];
        let r = corr2(&view((2, 2), &a), &view((2, 2), &b)).unwrap();
        assert!((r - 6.5 / 43.75f64.sqrt()).abs() < 1e-15);
        assert!((r - 0.9827076298239908).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = [0.3, 1.9, -2.0, 4.5, 0.0, 1.0];
        let b = [1.0, 0.5, 0.25, -1.0, 2.0, 3.5];
        let ab = corr2(&view((2, 3), &a), &view((2, 3), &b)).unwrap();
        let ba = corr2(&view((2, 3), &b), &view((2, 3), &a)).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let err = corr2(&view((2, 2), &a), &view((4, 1), &a)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn constant_input_rejected() {
        let a = [5.0, 5.0, 5.0, 5.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            corr2(&view((2, 2), &a), &view((2, 2), &b)).unwrap_err(),
            Error::DegenerateVariance(_)
        ));
        assert!(matches!(
            corr2(&view((2, 2), &b), &view((2, 2), &a)).unwrap_err(),
            Error::DegenerateVariance(_)
        ));
    }

    #[test]
    fn single_element_rejected() {
        let a = [1.0];
        assert!(matches!(
            corr2(&view((1, 1), &a), &view((1, 1), &a)).unwrap_err(),
            Error::InvalidValue(_)
        ));
    }

    #[test]
    fn works_on_masks_and_speckles() {
        let m1 = BinaryMask::new((2, 2), vec![1, 0, 0, 1]).unwrap();
        let m2 = BinaryMask::new((2, 2), vec![0, 1, 1, 0]).unwrap();
        assert!((corr2(&m1, &m2).unwrap() + 1.0).abs() < 1e-12);

        let s = SpecklePattern::new((2, 2), vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((corr2(&s, &s).unwrap() - 1.0).abs() < 1e-12);
    }
}
