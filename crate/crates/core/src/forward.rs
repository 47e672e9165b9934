//! Linear forward model: binary mask in, complex field or intensity
//! speckle out.
//!
//! Output pixel `m` is the superposition `Σ_n t(m,n) · mask(n)` over all ON
//! input pixels; a camera only records the squared modulus of that field.
//! Summation is always over ascending `n`, both in the single-mask path and
//! in the batched path, so the two produce bit-identical results.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pattern::{BinaryMask, FieldPattern, SpecklePattern};
use crate::tm::TransmissionMatrix;

/// Output field of one mask through the matrix.
pub fn forward_field(tm: &TransmissionMatrix, mask: &BinaryMask) -> Result<FieldPattern> {
    if mask.len() != tm.cols() {
        return Err(Error::LengthMismatch {
            expected: tm.cols(),
            got: mask.len(),
        });
    }
    let on: Vec<usize> = mask.on_indices().collect();
    let mut values = vec![Complex64::new(0.0, 0.0); tm.rows()];
    for (m, out) in values.iter_mut().enumerate() {
        let row = tm.row(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for &n in &on {
            acc += row[n];
        }
        *out = acc;
    }
    Ok(FieldPattern::new(tm.output_shape(), values).expect("finite sums of finite entries"))
}

/// Squared modulus of every field value.
pub fn intensity(field: &FieldPattern) -> SpecklePattern {
    let values = field.values().iter().map(|v| v.norm_sqr()).collect();
    SpecklePattern::from_values_unchecked(field.shape(), values)
}

/// `intensity(forward_field(tm, mask))` in one call.
pub fn forward_intensity(tm: &TransmissionMatrix, mask: &BinaryMask) -> Result<SpecklePattern> {
    Ok(intensity(&forward_field(tm, mask)?))
}

/// Row count per parallel work unit in the batched kernel. Fixed so that
/// results never depend on how many threads execute the chunks.
const BATCH_ROW_CHUNK: usize = 2048;

/// Column-major copy of a transmission matrix.
///
/// Repeated mask evaluation is dominated by summing the columns of ON
/// pixels; with column-major storage those sums stream over contiguous
/// memory and a whole batch of masks reuses each column while it is hot.
#[derive(Debug, Clone)]
pub struct ColumnMajorTm {
    rows: usize,
    cols: usize,
    output_shape: (usize, usize),
    data: Vec<Complex64>,
}

impl ColumnMajorTm {
    pub fn from_matrix(tm: &TransmissionMatrix) -> Self {
        let (rows, cols) = (tm.rows(), tm.cols());
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        for m in 0..rows {
            let row = tm.row(m);
            for (n, &t) in row.iter().enumerate() {
                data[n * rows + m] = t;
            }
        }
        Self {
            rows,
            cols,
            output_shape: tm.output_shape(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn output_shape(&self) -> (usize, usize) {
        self.output_shape
    }

    fn column(&self, n: usize) -> &[Complex64] {
        &self.data[n * self.rows..(n + 1) * self.rows]
    }

    /// Output fields for a batch of masks.
    ///
    /// Per output element the additions run over ascending `n`, exactly as
    /// in [`forward_field`]; the batched result is bit-identical to the
    /// one-at-a-time path. Work is split over fixed row chunks, so the
    /// result is also independent of the number of threads.
    pub fn forward_fields_batch(&self, masks: &[&BinaryMask]) -> Result<Vec<FieldPattern>> {
        for mask in masks {
            if mask.len() != self.cols {
                return Err(Error::LengthMismatch {
                    expected: self.cols,
                    got: mask.len(),
                });
            }
        }
        if masks.is_empty() {
            return Ok(Vec::new());
        }

        let p = masks.len();
        let chunk_starts: Vec<usize> = (0..self.rows).step_by(BATCH_ROW_CHUNK).collect();
        // Each chunk produces a dense [mask][row-in-chunk] block.
        let blocks: Vec<Vec<Complex64>> = chunk_starts
            .par_iter()
            .map(|&start| {
                let len = BATCH_ROW_CHUNK.min(self.rows - start);
                let mut acc = vec![Complex64::new(0.0, 0.0); p * len];
                for n in 0..self.cols {
                    let col = &self.column(n)[start..start + len];
                    for (k, mask) in masks.iter().enumerate() {
                        if mask.bit(n) == 1 {
                            let dst = &mut acc[k * len..(k + 1) * len];
                            for (d, &c) in dst.iter_mut().zip(col) {
                                *d += c;
                            }
                        }
                    }
                }
                acc
            })
            .collect();

        let mut fields = vec![vec![Complex64::new(0.0, 0.0); self.rows]; p];
        for (ci, &start) in chunk_starts.iter().enumerate() {
            let len = BATCH_ROW_CHUNK.min(self.rows - start);
            for k in 0..p {
                fields[k][start..start + len]
                    .copy_from_slice(&blocks[ci][k * len..(k + 1) * len]);
            }
        }
        Ok(fields
            .into_iter()
            .map(|values| {
                FieldPattern::new(self.output_shape, values).expect("finite sums")
            })
            .collect())
    }

    /// Intensity speckles for a batch of masks.
    pub fn forward_intensities_batch(&self, masks: &[&BinaryMask]) -> Result<Vec<SpecklePattern>> {
        Ok(self
            .forward_fields_batch(masks)?
            .iter()
            .map(intensity)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tm_1x2(t0: Complex64, t1: Complex64) -> TransmissionMatrix {
        TransmissionMatrix::new(1, 2, (1, 1), (1, 2), vec![t0, t1]).unwrap()
    }

    #[test]
    fn zero_mask_gives_zero_field() {
        let tm = tm_1x2(c(1.0, 2.0), c(-3.0, 4.0));
        let field = forward_field(&tm, &BinaryMask::zeros((1, 2))).unwrap();
        assert_eq!(field.values(), &[c(0.0, 0.0)]);
    }

    #[test]
    fn single_on_pixel_selects_matrix_column() {
        // 3x2 matrix, pixel 1 ON -> field equals column 1.
        let entries = vec![
            c(1.0, 0.0),
            c(0.5, -0.5),
            c(0.0, 1.0),
            c(2.0, 2.0),
            c(-1.0, 0.0),
            c(3.0, -3.0),
        ];
        let tm = TransmissionMatrix::new(3, 2, (3, 1), (1, 2), entries).unwrap();
        let mask = BinaryMask::new((1, 2), vec![0, 1]).unwrap();
        let field = forward_field(&tm, &mask).unwrap();
        let expected: Vec<_> = tm.column(1).collect();
        assert_eq!(field.values(), expected.as_slice());
    }

    #[test]
    fn analytic_sum_with_imaginary_entry() {
        // t = [1, i], mask = [1,1] -> field = 1+i, intensity 2.
        let tm = tm_1x2(c(1.0, 0.0), c(0.0, 1.0));
        let mask = BinaryMask::new((1, 2), vec![1, 1]).unwrap();
        let field = forward_field(&tm, &mask).unwrap();
        assert_eq!(field.values(), &[c(1.0, 1.0)]);
        assert_eq!(intensity(&field).values(), &[2.0]);
    }

    #[test]
    fn interference_differs_from_intensity_sum() {
        // t = [1, 1]: both pixels alone give intensity 1, together 4.
        let tm = tm_1x2(c(1.0, 0.0), c(1.0, 0.0));
        let both = BinaryMask::new((1, 2), vec![1, 1]).unwrap();
        let s = forward_intensity(&tm, &both).unwrap();
        assert_eq!(s.values(), &[4.0]);
    }

    #[test]
    fn intensity_is_squared_modulus() {
        let field = FieldPattern::new(
            (1, 2),
            vec![c(3.0, 0.0), c(0.0, 4.0)],
        )
        .unwrap();
        assert_eq!(intensity(&field).values(), &[9.0, 16.0]);

        let zeros = FieldPattern::new((1, 2), vec![c(0.0, 0.0); 2]).unwrap();
        assert_eq!(intensity(&zeros).values(), &[0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let tm = tm_1x2(c(1.0, 0.0), c(0.0, 1.0));
        let mask = BinaryMask::new((1, 3), vec![1, 0, 0]).unwrap();
        assert!(matches!(
            forward_field(&tm, &mask).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
    }

    #[test]
    fn batched_path_matches_single_path_bit_for_bit() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (m, n) = (37, 19);
        let entries: Vec<Complex64> = (0..m * n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let tm = TransmissionMatrix::new(m, n, (m, 1), (1, n), entries).unwrap();
        let cm = ColumnMajorTm::from_matrix(&tm);

        let masks: Vec<BinaryMask> = (0..5)
            .map(|_| {
                let bits = (0..n).map(|_| rng.random_range(0..=1) as u8).collect();
                BinaryMask::new((1, n), bits).unwrap()
            })
            .collect();
        let refs: Vec<&BinaryMask> = masks.iter().collect();
        let batch = cm.forward_fields_batch(&refs).unwrap();
        for (mask, field) in masks.iter().zip(&batch) {
            let single = forward_field(&tm, mask).unwrap();
            assert_eq!(single.values(), field.values());
        }
    }
}
