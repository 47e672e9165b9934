//! Per-generation statistics and their CSV export.

use std::io::{self, Write};

/// Snapshot of one generation.
///
/// `best_cc2` (retrieved-vs-original mask correlation) is present only
/// when the run was given a ground-truth image. `wall_time` is the
/// measured duration of the step in seconds; it is the one field that is
/// not reproducible across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: u64,
    pub best_cc1: f64,
    pub mean_cc1: f64,
    pub best_cc2: Option<f64>,
    pub wall_time: f64,
}

/// Full metrics series of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub rows: Vec<GenerationStats>,
}

impl RunMetrics {
    /// CSV columns: generation, best_cc1, mean_cc1, cc2, elapsed_s.
    /// `cc2` is `nan` when no ground truth was supplied; `elapsed_s` is
    /// cumulative wall time and is excluded from reproducibility
    /// comparisons.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "generation,best_cc1,mean_cc1,cc2,elapsed_s")?;
        let mut elapsed = 0.0;
        for row in &self.rows {
            elapsed += row.wall_time;
            let cc2 = row
                .best_cc2
                .map_or_else(|| "nan".to_string(), |v| format!("{v}"));
            writeln!(
                w,
                "{},{},{},{},{:.3}",
                row.generation, row.best_cc1, row.mean_cc1, cc2, elapsed
            )?;
        }
        Ok(())
    }
}
