//! TMX1: a flat binary container for transmission matrices.
//!
//! Layout, all little-endian:
//! magic `"TMX1"`, then u32 fields M, N, out_h, out_w, in_h, in_w, then
//! M×N entries as interleaved f64 (re, im) in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tm::TransmissionMatrix;

const MAGIC: &[u8; 4] = b"TMX1";

pub fn write_tmx_to(w: &mut impl Write, tm: &TransmissionMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    let (out_h, out_w) = tm.output_shape();
    let (in_h, in_w) = tm.input_shape();
    for v in [
        tm.rows() as u32,
        tm.cols() as u32,
        out_h as u32,
        out_w as u32,
        in_h as u32,
        in_w as u32,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    for t in tm.entries() {
        w.write_all(&t.re.to_le_bytes())?;
        w.write_all(&t.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tmx_from(r: &mut impl Read) -> Result<TransmissionMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let mut fields = [0u32; 6];
    for f in &mut fields {
        let mut buf = [0u8; 4];
        r.read_exact(&mut buf)?;
        *f = u32::from_le_bytes(buf);
    }
    let [m, n, out_h, out_w, in_h, in_w] = fields.map(|v| v as usize);

    let count = m
        .checked_mul(n)
        .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
    let mut entries = Vec::with_capacity(count);
    let mut buf = [0u8; 16];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        entries.push(Complex64::new(re, im));
    }
    TransmissionMatrix::new(m, n, (out_h, out_w), (in_h, in_w), entries)
}

pub fn write_tmx(path: impl AsRef<Path>, tm: &TransmissionMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_tmx_to(&mut w, tm)?;
    w.flush()?;
    Ok(())
}

pub fn read_tmx(path: impl AsRef<Path>) -> Result<TransmissionMatrix> {
    read_tmx_from(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{synth_tm, FiberSpec};

    #[test]
    fn round_trip_preserves_every_bit() {
        let tm = synth_tm(&FiberSpec::new((2, 3), (4, 2), 31).unwrap()).unwrap();
        let mut bytes = Vec::new();
        write_tmx_to(&mut bytes, &tm).unwrap();
        let back = read_tmx_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(tm, back);
    }

    #[test]
    fn header_layout_is_fixed() {
        let tm = synth_tm(&FiberSpec::new((1, 2), (2, 1), 0).unwrap()).unwrap();
        let mut bytes = Vec::new();
        write_tmx_to(&mut bytes, &tm).unwrap();
        assert_eq!(&bytes[..4], b"TMX1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2); // M
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2); // N
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2); // out_h
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 1); // out_w
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 1); // in_h
        assert_eq!(u32::from_le_bytes(bytes[24..28].try_into().unwrap()), 2); // in_w
        assert_eq!(bytes.len(), 28 + 2 * 2 * 16);
    }

    #[test]
    fn bad_magic_rejected() {
        let err = read_tmx_from(&mut b"NOPE".as_slice()).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn truncated_file_rejected() {
        let tm = synth_tm(&FiberSpec::new((2, 2), (2, 2), 0).unwrap()).unwrap();
        let mut bytes = Vec::new();
        write_tmx_to(&mut bytes, &tm).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(read_tmx_from(&mut bytes.as_slice()).is_err());
    }
}
