//! On-disk formats: the TMX1 matrix container and netpbm pattern files.

pub mod pnm;
pub mod tmx;

pub use pnm::{read_pbm, read_pgm16, write_pbm, write_pgm16};
pub use tmx::{read_tmx, write_tmx};
