//! Complex transmission matrix linking input pixels to output pixels.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// M×N complex matrix: entry `(m, n)` is the coefficient from input pixel
/// `n` to output pixel `m`. Entries are stored row-major. Both pixel
/// spaces carry an explicit 2-D shape whose product matches the matrix
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    rows: usize,
    cols: usize,
    output_shape: (usize, usize),
    input_shape: (usize, usize),
    entries: Vec<Complex64>,
}

impl TransmissionMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        output_shape: (usize, usize),
        input_shape: (usize, usize),
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        if output_shape.0 * output_shape.1 != rows {
            return Err(Error::InvalidConfig(format!(
                "output shape {output_shape:?} does not factor {rows} rows"
            )));
        }
        if input_shape.0 * input_shape.1 != cols {
            return Err(Error::InvalidConfig(format!(
                "input shape {input_shape:?} does not factor {cols} columns"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(pos) = entries
            .iter()
            .position(|t| !t.re.is_finite() || !t.im.is_finite())
        {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self {
            rows,
            cols,
            output_shape,
            input_shape,
            entries,
        })
    }

    /// Number of output pixels (M).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of input pixels (N).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn output_shape(&self) -> (usize, usize) {
        self.output_shape
    }

    pub fn input_shape(&self) -> (usize, usize) {
        self.input_shape
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.cols + n]
    }

    /// Contiguous row `m`: the coefficients of all inputs for one output
    /// pixel.
    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.entries[m * self.cols..(m + 1) * self.cols]
    }

    /// Column `n` (strided walk): the output field produced by input pixel
    /// `n` alone.
    pub fn column(&self, n: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.rows).map(move |m| self.entries[m * self.cols + n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shape_products_must_match_dimensions() {
        let err =
            TransmissionMatrix::new(2, 2, (2, 2), (1, 2), vec![c(0.0, 0.0); 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        let err =
            TransmissionMatrix::new(2, 2, (2, 1), (3, 1), vec![c(0.0, 0.0); 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn rejects_wrong_entry_count_and_non_finite() {
        assert!(matches!(
            TransmissionMatrix::new(2, 2, (2, 1), (2, 1), vec![c(0.0, 0.0); 3]).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
        let mut entries = vec![c(0.0, 0.0); 4];
        entries[2] = c(0.0, f64::INFINITY);
        assert!(matches!(
            TransmissionMatrix::new(2, 2, (2, 1), (2, 1), entries).unwrap_err(),
            Error::NonFinite(2)
        ));
    }

    #[test]
    fn row_and_column_access() {
        // [[1, 2i], [3, 4]]
        let tm = TransmissionMatrix::new(
            2,
            2,
            (2, 1),
            (1, 2),
            vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert_eq!(tm.entry(0, 1), c(0.0, 2.0));
        assert_eq!(tm.row(1), &[c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(tm.column(1).collect::<Vec<_>>(), vec![c(0.0, 2.0), c(4.0, 0.0)]);
    }
}
