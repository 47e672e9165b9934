//! Netpbm pattern files: 16-bit binary PGM for speckle intensities and
//! plain (ASCII) PBM for binary masks.
//!
//! Speckles hold arbitrary linear intensity units, so the PGM records the
//! quantization scale in a header comment (`# linear scale vmax=...`) and
//! stores `round(v / vmax * 65535)` per pixel, big-endian as the format
//! demands. Reading restores `px / 65535 * vmax`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pattern::{BinaryMask, SpecklePattern};

const PGM_MAX: f64 = 65535.0;

pub fn write_pgm16_to(w: &mut impl Write, speckle: &SpecklePattern) -> Result<()> {
    let (h, width) = speckle.shape();
    let vmax = speckle.max_value();
    writeln!(w, "P5")?;
    writeln!(w, "# linear scale vmax={vmax:e}")?;
    writeln!(w, "{width} {h}")?;
    writeln!(w, "65535")?;
    for &v in speckle.values() {
        let px = if vmax == 0.0 {
            0u16
        } else {
            (v / vmax * PGM_MAX).round() as u16
        };
        w.write_all(&px.to_be_bytes())?;
    }
    Ok(())
}

pub fn write_pgm16(path: impl AsRef<Path>, speckle: &SpecklePattern) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm16_to(&mut w, speckle)?;
    w.flush()?;
    Ok(())
}

/// Reads one whitespace/comment-delimited token from a PNM header,
/// returning the token and any `vmax=` scale found in skipped comments.
fn next_token(bytes: &[u8], pos: &mut usize, vmax: &mut Option<f64>) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            let comment = String::from_utf8_lossy(&bytes[start..*pos]);
            if let Some(idx) = comment.find("vmax=") {
                let tail = comment[idx + 5..].trim();
                *vmax = Some(tail.parse().map_err(|_| {
                    Error::Format(format!("unparseable vmax comment: {comment}"))
                })?);
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return Err(Error::Format("unexpected end of header".into()));
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_dim(tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Format(format!("bad dimension token {tok:?}")))
}

pub fn read_pgm16_from(r: &mut impl Read) -> Result<SpecklePattern> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut vmax = None;

    if next_token(&bytes, &mut pos, &mut vmax)? != "P5" {
        return Err(Error::Format("not a binary PGM (P5) file".into()));
    }
    let width = parse_dim(&next_token(&bytes, &mut pos, &mut vmax)?)?;
    let height = parse_dim(&next_token(&bytes, &mut pos, &mut vmax)?)?;
    let maxval = parse_dim(&next_token(&bytes, &mut pos, &mut vmax)?)?;
    if maxval != 65535 {
        return Err(Error::Format(format!(
            "expected 16-bit PGM (maxval 65535), got {maxval}"
        )));
    }
    // Exactly one whitespace byte separates header and raster.
    pos += 1;

    let count = width * height;
    if bytes.len() < pos + 2 * count {
        return Err(Error::Format("PGM raster truncated".into()));
    }
    let vmax = vmax.ok_or_else(|| {
        Error::Format("PGM is missing the linear-scale vmax comment".into())
    })?;
    let values = (0..count)
        .map(|i| {
            let px = u16::from_be_bytes([bytes[pos + 2 * i], bytes[pos + 2 * i + 1]]);
            f64::from(px) / PGM_MAX * vmax
        })
        .collect();
    SpecklePattern::new((height, width), values)
}

pub fn read_pgm16(path: impl AsRef<Path>) -> Result<SpecklePattern> {
    read_pgm16_from(&mut BufReader::new(File::open(path)?))
}

pub fn write_pbm_to(w: &mut impl Write, mask: &BinaryMask) -> Result<()> {
    let (h, width) = mask.shape();
    writeln!(w, "P1")?;
    writeln!(w, "{width} {h}")?;
    // Plain PBM caps lines at 70 characters; emit unspaced bits in short
    // rows independent of the mask width.
    for chunk in mask.bits().chunks(60) {
        let line: String = chunk.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_pbm(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pbm_to(&mut w, mask)?;
    w.flush()?;
    Ok(())
}

pub fn read_pbm_from(r: &mut impl Read) -> Result<BinaryMask> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut vmax = None;

    if next_token(&bytes, &mut pos, &mut vmax)? != "P1" {
        return Err(Error::Format("not a plain PBM (P1) file".into()));
    }
    let width = parse_dim(&next_token(&bytes, &mut pos, &mut vmax)?)?;
    let height = parse_dim(&next_token(&bytes, &mut pos, &mut vmax)?)?;

    let mut bits = Vec::with_capacity(width * height);
    while pos < bytes.len() && bits.len() < width * height {
        match bytes[pos] {
            b'0' => bits.push(0),
            b'1' => bits.push(1),
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            c if c.is_ascii_whitespace() => {}
            c => {
                return Err(Error::Format(format!(
                    "unexpected byte {c:#04x} in PBM raster"
                )))
            }
        }
        pos += 1;
    }
    if bits.len() != width * height {
        return Err(Error::Format(format!(
            "PBM raster has {} bits, expected {}",
            bits.len(),
            width * height
        )));
    }
    BinaryMask::new((height, width), bits)
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<BinaryMask> {
    read_pbm_from(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn pbm_round_trip() {
        let mask = builtin::letter_z((12, 12)).unwrap();
        let mut bytes = Vec::new();
        write_pbm_to(&mut bytes, &mask).unwrap();
        let back = read_pbm_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(mask, back);
    }

    #[test]
    fn pbm_lines_stay_short() {
        let mask = BinaryMask::new((2, 96), vec![1; 192]).unwrap();
        let mut bytes = Vec::new();
        write_pbm_to(&mut bytes, &mask).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.lines().all(|l| l.len() <= 70));
    }

    #[test]
    fn pgm_round_trip_within_quantization() {
        let values: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin().powi(2) * 5.0).collect();
        let speckle = SpecklePattern::new((8, 8), values).unwrap();
        let mut bytes = Vec::new();
        write_pgm16_to(&mut bytes, &speckle).unwrap();
        let back = read_pgm16_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back.shape(), (8, 8));
        let vmax = speckle.max_value();
        for (a, b) in speckle.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= vmax / 65535.0, "a={a} b={b}");
        }
    }

    #[test]
    fn pgm_write_is_deterministic() {
        let speckle = SpecklePattern::new((2, 2), vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_pgm16_to(&mut a, &speckle).unwrap();
        write_pgm16_to(&mut b, &speckle).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(b"P5\n# linear scale vmax="));
    }

    #[test]
    fn all_zero_speckle_survives() {
        let speckle = SpecklePattern::new((2, 2), vec![0.0; 4]).unwrap();
        let mut bytes = Vec::new();
        write_pgm16_to(&mut bytes, &speckle).unwrap();
        let back = read_pgm16_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back.values(), &[0.0; 4]);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(read_pbm_from(&mut b"P5\n2 2\n".as_slice()).is_err());
        assert!(read_pgm16_from(&mut b"P1\n2 2\n0110\n".as_slice()).is_err());
        assert!(read_pbm_from(&mut b"P1\n2 2\n011\n".as_slice()).is_err());
        // 8-bit PGM is not accepted for speckles.
        assert!(read_pgm16_from(&mut b"P5\n# vmax=1.0\n1 1\n255\n\x20".as_slice()).is_err());
    }
}
