//! 2-D pattern types: binary input masks, complex output fields and
//! intensity speckle patterns.
//!
//! All three store their samples flat in row-major order together with an
//! explicit `(height, width)` shape. They are immutable after construction,
//! so shared references are safe across threads.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Binary input image on a 2-D macro-pixel grid. Bit 1 means the
/// corresponding input pixel is ON, 0 means OFF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    shape: (usize, usize),
    bits: Vec<u8>,
}

impl BinaryMask {
    /// Builds a mask, rejecting anything that is not exactly 0 or 1 and
    /// any length that disagrees with `shape`.
    pub fn new(shape: (usize, usize), bits: Vec<u8>) -> Result<Self> {
        let n = shape.0 * shape.1;
        if bits.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bits.len(),
            });
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidValue(format!(
                "mask bit at flat index {pos} is {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self { shape, bits })
    }

    pub fn zeros(shape: (usize, usize)) -> Self {
        Self {
            shape,
            bits: vec![0; shape.0 * shape.1],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Number of pixels (`height * width`).
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, flat: usize) -> u8 {
        self.bits[flat]
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.shape.1 + col]
    }

    /// Flat indices of ON pixels, ascending.
    pub fn on_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    pub fn on_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// True when every bit is equal (all ON or all OFF); such masks have
    /// zero variance and cannot enter a correlation.
    pub fn is_constant(&self) -> bool {
        self.bits.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn from_bits_unchecked(shape: (usize, usize), bits: Vec<u8>) -> Self {
        debug_assert_eq!(bits.len(), shape.0 * shape.1);
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { shape, bits }
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [u8] {
        &mut self.bits
    }
}

/// Complex output field over a 2-D camera grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPattern {
    shape: (usize, usize),
    values: Vec<Complex64>,
}

impl FieldPattern {
    pub fn new(shape: (usize, usize), values: Vec<Complex64>) -> Result<Self> {
        let n = shape.0 * shape.1;
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Non-negative intensity image (the squared modulus of a field).
#[derive(Debug, Clone, PartialEq)]
pub struct SpecklePattern {
    shape: (usize, usize),
    values: Vec<f64>,
}

impl SpecklePattern {
    pub fn new(shape: (usize, usize), values: Vec<f64>) -> Result<Self> {
        let n = shape.0 * shape.1;
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        for (pos, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(pos));
            }
            if v < 0.0 {
                return Err(Error::InvalidValue(format!(
                    "intensity at flat index {pos} is negative ({v})"
                )));
            }
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn from_values_unchecked(shape: (usize, usize), values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), shape.0 * shape.1);
        Self { shape, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_rejects_non_binary_values() {
        let err = BinaryMask::new((1, 3), vec![0, 2, 1]).unwrap_err();
        assert!(matches!(err, Error::InvalidValue(_)));
    }

    #[test]
    fn mask_rejects_length_mismatch() {
        let err = BinaryMask::new((2, 2), vec![0, 1, 1]).unwrap_err();
        assert!(matches!(
            err,
            Error::LengthMismatch {
                expected: 4,
                got: 3
            }
        ));
    }

    #[test]
    fn mask_on_indices_ascending() {
        let mask = BinaryMask::new((2, 3), vec![0, 1, 0, 1, 1, 0]).unwrap();
        assert_eq!(mask.on_indices().collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(mask.on_count(), 3);
        assert!(!mask.is_constant());
        assert!(BinaryMask::zeros((2, 2)).is_constant());
    }

    #[test]
    fn field_rejects_non_finite() {
        let err =
            FieldPattern::new((1, 2), vec![Complex64::new(1.0, 0.0), Complex64::new(f64::NAN, 0.0)])
                .unwrap_err();
        assert!(matches!(err, Error::NonFinite(1)));
    }

    #[test]
    fn speckle_rejects_negative_and_non_finite() {
        assert!(matches!(
            SpecklePattern::new((1, 2), vec![1.0, -0.5]).unwrap_err(),
            Error::InvalidValue(_)
        ));
        assert!(matches!(
            SpecklePattern::new((1, 2), vec![1.0, f64::INFINITY]).unwrap_err(),
            Error::NonFinite(1)
        ));
    }
}
