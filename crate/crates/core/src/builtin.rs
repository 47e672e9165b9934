//! Built-in binary test images, so experiments need no external assets.

use crate::error::{Error, Result};
use crate::pattern::BinaryMask;

/// Names accepted by [`by_name`].
pub const BUILTIN_NAMES: [&str; 3] = ["letter-z", "checkerboard", "single-pixel"];

/// A block letter Z: solid top and bottom bars joined by a diagonal
/// stroke. Stroke thickness scales with the grid.
pub fn letter_z(shape: (usize, usize)) -> Result<BinaryMask> {
    let (h, w) = shape;
    if h < 3 || w < 3 {
        return Err(Error::InvalidConfig(format!(
            "letter-z needs at least a 3x3 grid, got {h}x{w}"
        )));
    }
    let t = (h / 6).max(1);
    let mut bits = vec![0u8; h * w];
    for r in 0..h {
        for c in 0..w {
            let bar = r < t || r >= h - t;
            // Diagonal from top-right to bottom-left over the inner rows.
            let center = ((h - 1 - r) * (w - 1)) as f64 / (h - 1) as f64;
            let diag = (c as f64 - center).abs() < t as f64;
            if bar || diag {
                bits[r * w + c] = 1;
            }
        }
    }
    BinaryMask::new(shape, bits)
}

/// Alternating ON/OFF pixels.
pub fn checkerboard(shape: (usize, usize)) -> Result<BinaryMask> {
    let (h, w) = shape;
    if h * w < 2 {
        return Err(Error::InvalidConfig(
            "checkerboard needs at least 2 pixels".into(),
        ));
    }
    let bits = (0..h * w)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            ((r + c) % 2 == 0) as u8
        })
        .collect();
    BinaryMask::new(shape, bits)
}

/// A single ON pixel at the grid center.
pub fn single_pixel(shape: (usize, usize)) -> Result<BinaryMask> {
    let (h, w) = shape;
    if h * w < 2 {
        return Err(Error::InvalidConfig(
            "single-pixel needs at least 2 pixels".into(),
        ));
    }
    let mut bits = vec![0u8; h * w];
    bits[(h / 2) * w + w / 2] = 1;
    BinaryMask::new(shape, bits)
}

/// Looks a pattern up by its CLI name.
pub fn by_name(name: &str, shape: (usize, usize)) -> Result<BinaryMask> {
    match name {
        "letter-z" => letter_z(shape),
        "checkerboard" => checkerboard(shape),
        "single-pixel" => single_pixel(shape),
        other => Err(Error::InvalidConfig(format!(
            "unknown built-in pattern {other:?}; available: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_z_has_bars_and_diagonal() {
        let z = letter_z((12, 12)).unwrap();
        // Top and bottom bars fully ON.
        for c in 0..12 {
            assert_eq!(z.get(0, c), 1);
            assert_eq!(z.get(11, c), 1);
        }
        // Diagonal runs top-right to bottom-left.
        assert_eq!(z.get(2, 9), 1);
        assert_eq!(z.get(9, 2), 1);
        assert_eq!(z.get(5, 1), 0);
        assert!(!z.is_constant());
    }

    #[test]
    fn builtin_lookup() {
        for name in BUILTIN_NAMES {
            let mask = by_name(name, (12, 12)).unwrap();
            assert_eq!(mask.shape(), (12, 12));
            assert!(!mask.is_constant());
        }
        assert!(by_name("nope", (12, 12)).is_err());
    }

    #[test]
    fn checkerboard_alternates() {
        let cb = checkerboard((4, 4)).unwrap();
        assert_eq!(cb.get(0, 0), 1);
        assert_eq!(cb.get(0, 1), 0);
        assert_eq!(cb.get(1, 0), 0);
        assert_eq!(cb.on_count(), 8);
    }

    #[test]
    fn single_pixel_is_lone() {
        let sp = single_pixel((5, 5)).unwrap();
        assert_eq!(sp.on_count(), 1);
        assert_eq!(sp.get(2, 2), 1);
    }
}
