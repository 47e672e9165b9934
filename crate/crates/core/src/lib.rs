//! Simulation and inversion of intensity-only imaging through a highly
//! scattering optical channel.
//!
//! A complex transmission matrix maps binary input masks to speckle
//! intensity patterns; a genetic algorithm inverts one captured speckle
//! back into the binary image that produced it by maximizing pattern
//! correlation. The crate also ships a synthetic fiber generator (random
//! matrices, a bend perturbation model, measurement noise), an exhaustive
//! brute-force oracle for small instances, and the file formats the CLI
//! speaks.

pub mod builtin;
pub mod corr;
pub mod error;
pub mod forward;
pub mod ga;
pub mod io;
pub mod oracle;
pub mod pattern;
pub mod sim;
pub mod tm;

pub use corr::{corr2, Real2d, Real2dView};
pub use error::{Error, Result};
pub use forward::{forward_field, forward_intensity, intensity, ColumnMajorTm};
pub use pattern::{BinaryMask, FieldPattern, SpecklePattern};
pub use tm::TransmissionMatrix;
