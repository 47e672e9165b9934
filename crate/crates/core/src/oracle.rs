//! Exhaustive ground truth for small instances: every one of the 2^N
//! binary masks is pushed through the forward model and scored against
//! the target. Deliberately dumb — its whole value is that nothing clever
//! can be wrong.
//!
//! Enumeration order maps counter bit `k` to mask pixel `k` (row-major).
//! The range is split over workers in fixed chunks; merging maxima and
//! counts is associative, so the report never depends on thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::corr::corr2;
use crate::error::{Error, Result};
use crate::forward::ColumnMajorTm;
use crate::pattern::{BinaryMask, SpecklePattern};
use crate::tm::TransmissionMatrix;

/// Hard cap on exhaustive enumeration.
pub const MAX_ORACLE_INPUTS: usize = 24;

/// Masks within this distance of the exact maximum count as ties.
pub const TIE_EPSILON: f64 = 1e-12;

const HISTOGRAM_BINS: usize = 2048;
const ENUM_CHUNK: u64 = 1 << 12;

/// Everything the exhaustive search learned about one instance.
///
/// The histogram covers the cost values of all non-degenerate masks over
/// [-1, 1]; together with `degenerate_count` its mass accounts for every
/// one of the 2^N masks.
#[derive(Debug, Clone, Serialize)]
pub struct LandscapeReport {
    pub n: usize,
    pub best_mask_bits: Vec<u8>,
    pub best_cc1: f64,
    pub ties: u64,
    pub histogram_edges: Vec<f64>,
    pub histogram_counts: Vec<u64>,
    pub degenerate_count: u64,
    #[serde(skip)]
    best_mask: BinaryMask,
}

impl LandscapeReport {
    pub fn best_mask(&self) -> &BinaryMask {
        &self.best_mask
    }

    pub fn total_masks(&self) -> u64 {
        1u64 << self.n
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn mask_bits_from_id(id: u64, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((id >> k) & 1) as u8).collect()
}

fn mask_of_id(id: u64, shape: (usize, usize)) -> BinaryMask {
    BinaryMask::from_bits_unchecked(shape, mask_bits_from_id(id, shape.0 * shape.1))
}

struct ChunkResult {
    best_cc1: f64,
    best_id: u64,
    degenerate: u64,
    histogram: Vec<u64>,
}

/// Enumerates every binary mask, scores it against the target, and
/// reports the argmax, the tie count within [`TIE_EPSILON`], a histogram
/// of the whole cost landscape, and how many masks were degenerate
/// (constant speckle, excluded from the argmax).
pub fn brute_force_best_mask(
    tm: &TransmissionMatrix,
    target: &SpecklePattern,
) -> Result<LandscapeReport> {
    let n = tm.cols();
    if n > MAX_ORACLE_INPUTS {
        return Err(Error::Capacity(format!(
            "exhaustive search over {n} inputs would enumerate 2^{n} masks; \
             the cap is N = {MAX_ORACLE_INPUTS}"
        )));
    }
    if target.shape() != tm.output_shape() {
        return Err(Error::ShapeMismatch {
            expected: tm.output_shape(),
            got: target.shape(),
        });
    }
    if target.is_constant() {
        return Err(Error::DegenerateVariance(
            "target speckle is constant; correlations against it are undefined",
        ));
    }

    let columns = ColumnMajorTm::from_matrix(tm);
    let shape = tm.input_shape();
    let total: u64 = 1u64 << n;
    let chunks: Vec<u64> = (0..total).step_by(ENUM_CHUNK as usize).collect();

    let score_of = |id: u64| -> Result<Option<f64>> {
        let mask = mask_of_id(id, shape);
        let speckle = columns.forward_intensities_batch(&[&mask])?.pop().unwrap();
        match corr2(&speckle, target) {
            Ok(v) => Ok(Some(v)),
            Err(Error::DegenerateVariance(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };

    // Pass 1: exact maximum and its smallest mask id.
    let pass1: Result<Vec<ChunkResult>> = chunks
        .par_iter()
        .map(|&start| {
            let end = (start + ENUM_CHUNK).min(total);
            let mut best_cc1 = f64::NEG_INFINITY;
            let mut best_id = 0u64;
            let mut degenerate = 0u64;
            let mut histogram = vec![0u64; HISTOGRAM_BINS];
            for id in start..end {
                match score_of(id)? {
                    None => degenerate += 1,
                    Some(cc) => {
                        if cc > best_cc1 {
                            best_cc1 = cc;
                            best_id = id;
                        }
                        let bin = (((cc + 1.0) / 2.0) * HISTOGRAM_BINS as f64) as usize;
                        histogram[bin.min(HISTOGRAM_BINS - 1)] += 1;
                    }
                }
            }
            Ok(ChunkResult {
                best_cc1,
                best_id,
                degenerate,
                histogram,
            })
        })
        .collect();
    let parts = pass1?;

    let mut best_cc1 = f64::NEG_INFINITY;
    let mut best_id = 0u64;
    let mut degenerate_count = 0u64;
    let mut histogram_counts = vec![0u64; HISTOGRAM_BINS];
    for part in &parts {
        if part.best_cc1 > best_cc1 || (part.best_cc1 == best_cc1 && part.best_id < best_id) {
            best_cc1 = part.best_cc1;
            best_id = part.best_id;
        }
        degenerate_count += part.degenerate;
        for (acc, &c) in histogram_counts.iter_mut().zip(&part.histogram) {
            *acc += c;
        }
    }
    if best_cc1 == f64::NEG_INFINITY {
        return Err(Error::DegenerateVariance(
            "every mask produced a constant speckle",
        ));
    }

    // Pass 2: tie count needs the global maximum.
    let threshold = best_cc1 - TIE_EPSILON;
    let ties: Result<u64> = chunks
        .par_iter()
        .map(|&start| {
            let end = (start + ENUM_CHUNK).min(total);
            let mut count = 0u64;
            for id in start..end {
                if let Some(cc) = score_of(id)? {
                    if cc >= threshold {
                        count += 1;
                    }
                }
            }
            Ok(count)
        })
        .sum();
    let ties = ties?;

    let histogram_edges = (0..=HISTOGRAM_BINS)
        .map(|i| -1.0 + 2.0 * i as f64 / HISTOGRAM_BINS as f64)
        .collect();
    let best_mask = BinaryMask::from_bits_unchecked(shape, mask_bits_from_id(best_id, n));
    Ok(LandscapeReport {
        n,
        best_mask_bits: best_mask.bits().to_vec(),
        best_cc1,
        ties,
        histogram_edges,
        histogram_counts,
        degenerate_count,
        best_mask,
    })
}

/// Number of masks with cost within `epsilon` of the best.
///
/// `epsilon == 0` returns the exact tie count; other values are resolved
/// at histogram granularity (all masks in bins whose upper edge reaches
/// the threshold).
pub fn near_optimal_count(report: &LandscapeReport, epsilon: f64) -> u64 {
    if epsilon == 0.0 {
        return report.ties;
    }
    let threshold = report.best_cc1 - epsilon;
    report
        .histogram_counts
        .iter()
        .enumerate()
        .filter(|(bin, _)| report.histogram_edges[bin + 1] >= threshold)
        .map(|(_, &count)| count)
        .sum()
}
