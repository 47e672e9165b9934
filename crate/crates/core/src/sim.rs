//! Synthetic experiment generation: random transmission matrices standing
//! in for a calibrated fiber, a bend-perturbation model, measurement
//! noise, and calibration-set generation.
//!
//! Every generator here is a pure function of its seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::ColumnMajorTm;
use crate::pattern::{BinaryMask, SpecklePattern};
use crate::tm::TransmissionMatrix;

/// Description of a synthetic fiber: grid sizes and the seed of its
/// random transmission matrix. Entries are i.i.d. circular complex
/// Gaussian with variance 1/N, the standard random-matrix model for a
/// highly multimode scattering channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub n_inputs: usize,
    pub m_outputs: usize,
    pub input_shape: (usize, usize),
    pub output_shape: (usize, usize),
    pub seed: u64,
}

impl FiberSpec {
    pub fn new(
        input_shape: (usize, usize),
        output_shape: (usize, usize),
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            n_inputs: input_shape.0 * input_shape.1,
            m_outputs: output_shape.0 * output_shape.1,
            input_shape,
            output_shape,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 || self.m_outputs == 0 {
            return Err(Error::InvalidConfig(
                "fiber needs at least one input and one output pixel".into(),
            ));
        }
        if self.input_shape.0 * self.input_shape.1 != self.n_inputs {
            return Err(Error::InvalidConfig(format!(
                "input shape {:?} does not factor {} inputs",
                self.input_shape, self.n_inputs
            )));
        }
        if self.output_shape.0 * self.output_shape.1 != self.m_outputs {
            return Err(Error::InvalidConfig(format!(
                "output shape {:?} does not factor {} outputs",
                self.output_shape, self.m_outputs
            )));
        }
        Ok(())
    }
}

impl Default for FiberSpec {
    /// The experimental scale this crate models by default: 1296 input
    /// macro-pixels on a 36×36 grid, 9216 output pixels on a 96×96 grid.
    fn default() -> Self {
        Self {
            n_inputs: 1296,
            m_outputs: 9216,
            input_shape: (36, 36),
            output_shape: (96, 96),
            seed: 0,
        }
    }
}

/// A bend of the fiber, abstracted to a displacement in [0, 1]:
/// 0 leaves the reference matrix untouched, 1 replaces it with an
/// independent draw from the same distribution.
#[derive(Debug, Clone)]
pub struct BendState<'a> {
    pub displacement: f64,
    pub reference_tm: &'a TransmissionMatrix,
    pub perturbation_seed: u64,
}

fn sample_entries(rng: &mut ChaCha8Rng, count: usize, per_component_std: f64) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * per_component_std, im * per_component_std)
        })
        .collect()
}

/// Draws the random transmission matrix described by `spec`.
pub fn synth_tm(spec: &FiberSpec) -> Result<TransmissionMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // Entry variance 1/N splits evenly over the two components.
    let std = (1.0 / (2.0 * spec.n_inputs as f64)).sqrt();
    let entries = sample_entries(&mut rng, spec.m_outputs * spec.n_inputs, std);
    TransmissionMatrix::new(
        spec.m_outputs,
        spec.n_inputs,
        spec.output_shape,
        spec.input_shape,
        entries,
    )
}

/// Interpolates the reference matrix toward an independent random one:
/// `T(d) = sqrt(1-d)·T0 + sqrt(d)·R`. The square-root weights keep the
/// entry variance constant along the whole sweep.
pub fn perturb_tm_bend(bend: &BendState<'_>) -> Result<TransmissionMatrix> {
    let d = bend.displacement;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain(format!(
            "bend displacement must lie in [0, 1], got {d}"
        )));
    }
    let t0 = bend.reference_tm;
    if d == 0.0 {
        return Ok(t0.clone());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(bend.perturbation_seed);
    let std = (1.0 / (2.0 * t0.cols() as f64)).sqrt();
    let fresh = sample_entries(&mut rng, t0.rows() * t0.cols(), std);
    if d == 1.0 {
        return TransmissionMatrix::new(
            t0.rows(),
            t0.cols(),
            t0.output_shape(),
            t0.input_shape(),
            fresh,
        );
    }

    let (wa, wb) = ((1.0 - d).sqrt(), d.sqrt());
    let entries = t0
        .entries()
        .iter()
        .zip(&fresh)
        .map(|(a, b)| a * wa + b * wb)
        .collect();
    TransmissionMatrix::new(
        t0.rows(),
        t0.cols(),
        t0.output_shape(),
        t0.input_shape(),
        entries,
    )
}

/// Multiplicative Gaussian measurement noise, clamped at zero:
/// every value v becomes `max(0, v·(1+ε))` with `ε ~ N(0, relative_sigma)`.
pub fn add_measurement_noise(
    speckle: &SpecklePattern,
    relative_sigma: f64,
    rng: &mut impl Rng,
) -> Result<SpecklePattern> {
    if !relative_sigma.is_finite() || relative_sigma < 0.0 {
        return Err(Error::Domain(format!(
            "relative noise sigma must be finite and >= 0, got {relative_sigma}"
        )));
    }
    if relative_sigma == 0.0 {
        return Ok(speckle.clone());
    }
    let values = speckle
        .values()
        .iter()
        .map(|&v| {
            let eps: f64 = StandardNormal.sample(rng);
            (v * (1.0 + eps * relative_sigma)).max(0.0)
        })
        .collect();
    Ok(SpecklePattern::from_values_unchecked(
        speckle.shape(),
        values,
    ))
}

/// Random mask / speckle pairs through a fixed matrix, the shape of a
/// calibration acquisition. The pairs are provided for interoperability
/// with external calibration tools; this crate never fits a matrix from
/// them.
pub fn gen_calibration_set(
    tm: &TransmissionMatrix,
    count: usize,
    on_ratio: f64,
    seed: u64,
) -> Result<Vec<(BinaryMask, SpecklePattern)>> {
    if count == 0 {
        return Err(Error::InvalidConfig(
            "calibration set needs at least one pair".into(),
        ));
    }
    if !(0.0..=1.0).contains(&on_ratio) {
        return Err(Error::Domain(format!(
            "on ratio must lie in [0, 1], got {on_ratio}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = tm.input_shape();
    let masks: Vec<BinaryMask> = (0..count)
        .map(|_| {
            let bits = (0..tm.cols())
                .map(|_| rng.random_bool(on_ratio) as u8)
                .collect();
            BinaryMask::from_bits_unchecked(shape, bits)
        })
        .collect();

    // Batched forward pass; identical values to per-mask forward_intensity.
    let cm = ColumnMajorTm::from_matrix(tm);
    let mut pairs = Vec::with_capacity(count);
    for chunk in masks.chunks(64) {
        let refs: Vec<&BinaryMask> = chunk.iter().collect();
        let speckles = cm.forward_intensities_batch(&refs)?;
        for (mask, speckle) in chunk.iter().zip(speckles) {
            pairs.push((mask.clone(), speckle));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::{corr2, Real2dView};
    use crate::forward::forward_intensity;

    #[test]
    fn synth_tm_is_deterministic_in_seed() {
        let spec = FiberSpec::new((4, 4), (8, 8), 99).unwrap();
        let a = synth_tm(&spec).unwrap();
        let b = synth_tm(&spec).unwrap();
        assert_eq!(a, b);
        let other = synth_tm(&FiberSpec::new((4, 4), (8, 8), 100).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn synth_tm_rejects_zero_dimensions() {
        assert!(FiberSpec::new((0, 4), (8, 8), 1).is_err());
    }

    #[test]
    fn mean_squared_column_norm_near_m_over_n() {
        // E Σ_m |t_mn|^2 = M/N; averaged over all columns of 10 seeds.
        let (n_side, m_side) = (36, 48); // N=1296, M=2304
        let mut total = 0.0;
        let mut cols = 0usize;
        for seed in 0..10 {
            let spec = FiberSpec::new((n_side, n_side), (m_side, m_side), seed).unwrap();
            let tm = synth_tm(&spec).unwrap();
            for n in 0..tm.cols() {
                total += tm.column(n).map(|t| t.norm_sqr()).sum::<f64>();
                cols += 1;
            }
        }
        let expected = (m_side * m_side) as f64 / (n_side * n_side) as f64;
        let mean = total / cols as f64;
        assert!(
            (mean - expected).abs() / expected < 0.05,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn entry_distribution_moments() {
        // Circular complex Gaussian, variance 1/N: per-component mean 0,
        // per-component variance 1/(2N), components uncorrelated. Sampled
        // over many small matrices (N=2 -> component variance 0.25).
        let mut res = Vec::new();
        let mut ims = Vec::new();
        for seed in 0..2500 {
            let spec = FiberSpec::new((1, 2), (2, 1), seed).unwrap();
            let tm = synth_tm(&spec).unwrap();
            for t in tm.entries() {
                res.push(t.re);
                ims.push(t.im);
            }
        }
        let n = res.len() as f64;
        let mean_re = res.iter().sum::<f64>() / n;
        let mean_im = ims.iter().sum::<f64>() / n;
        let var_re = res.iter().map(|v| (v - mean_re).powi(2)).sum::<f64>() / n;
        let var_im = ims.iter().map(|v| (v - mean_im).powi(2)).sum::<f64>() / n;
        let cov = res
            .iter()
            .zip(&ims)
            .map(|(r, i)| (r - mean_re) * (i - mean_im))
            .sum::<f64>()
            / n;
        assert!(mean_re.abs() < 0.01, "mean re {mean_re}");
        assert!(mean_im.abs() < 0.01, "mean im {mean_im}");
        assert!((var_re - 0.25).abs() < 0.01, "var re {var_re}");
        assert!((var_im - 0.25).abs() < 0.01, "var im {var_im}");
        assert!(cov.abs() < 0.01, "re/im covariance {cov}");
    }

    #[test]
    fn bend_zero_is_identity() {
        let tm = synth_tm(&FiberSpec::new((3, 3), (4, 4), 5).unwrap()).unwrap();
        let bent = perturb_tm_bend(&BendState {
            displacement: 0.0,
            reference_tm: &tm,
            perturbation_seed: 123,
        })
        .unwrap();
        assert_eq!(tm, bent);
    }

    #[test]
    fn bend_outside_unit_interval_rejected() {
        let tm = synth_tm(&FiberSpec::new((2, 2), (2, 2), 5).unwrap()).unwrap();
        for d in [-0.1, 1.1, f64::NAN] {
            assert!(perturb_tm_bend(&BendState {
                displacement: d,
                reference_tm: &tm,
                perturbation_seed: 1,
            })
            .is_err());
        }
    }

    #[test]
    fn full_bend_decorrelates_entries() {
        // d = 1: entrywise correlation with the reference below 0.05 over
        // at least 10^4 entries.
        let tm = synth_tm(&FiberSpec::new((10, 10), (10, 10), 42).unwrap()).unwrap();
        let bent = perturb_tm_bend(&BendState {
            displacement: 1.0,
            reference_tm: &tm,
            perturbation_seed: 77,
        })
        .unwrap();
        let a: Vec<f64> = tm.entries().iter().map(|t| t.re).collect();
        let b: Vec<f64> = bent.entries().iter().map(|t| t.re).collect();
        let shape = (1, a.len());
        let rho = corr2(
            &Real2dView {
                shape,
                values: &a,
            },
            &Real2dView {
                shape,
                values: &b,
            },
        )
        .unwrap();
        assert!(rho.abs() < 0.05, "entrywise correlation {rho}");
    }

    #[test]
    fn bend_preserves_entry_variance() {
        let tm = synth_tm(&FiberSpec::new((8, 8), (12, 12), 9).unwrap()).unwrap();
        let reference_var = 1.0 / tm.cols() as f64;
        for (i, d) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
            let bent = perturb_tm_bend(&BendState {
                displacement: *d,
                reference_tm: &tm,
                perturbation_seed: 1000 + i as u64,
            })
            .unwrap();
            let var = bent.entries().iter().map(|t| t.norm_sqr()).sum::<f64>()
                / bent.entries().len() as f64;
            assert!(
                (var - reference_var).abs() / reference_var < 0.05,
                "entry variance {var} at d={d}, expected ~{reference_var}"
            );
        }
    }

    #[test]
    fn speckle_decorrelation_is_monotone_in_displacement() {
        // Fixed mask through T(d) vs T(0): the average correlation over 10
        // seeds decreases at every sweep step.
        let displacements = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let mut avg = [0.0f64; 6];
        for seed in 0..10u64 {
            let spec = FiberSpec::new((8, 8), (16, 16), seed).unwrap();
            let tm = synth_tm(&spec).unwrap();
            let mask = crate::builtin::checkerboard(spec.input_shape).unwrap();
            let straight = forward_intensity(&tm, &mask).unwrap();
            for (i, &d) in displacements.iter().enumerate() {
                let bent = perturb_tm_bend(&BendState {
                    displacement: d,
                    reference_tm: &tm,
                    perturbation_seed: seed.wrapping_mul(61) + 7,
                })
                .unwrap();
                let s = forward_intensity(&bent, &mask).unwrap();
                avg[i] += corr2(&s, &straight).unwrap() / 10.0;
            }
        }
        assert!((avg[0] - 1.0).abs() < 1e-9, "d=0 must correlate perfectly");
        for w in avg.windows(2) {
            assert!(w[1] < w[0], "decorrelation not monotone: {avg:?}");
        }
    }

    #[test]
    fn noise_sigma_zero_is_identity() {
        let s = SpecklePattern::new((2, 2), vec![0.5, 1.5, 2.5, 3.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = add_measurement_noise(&s, 0.0, &mut rng).unwrap();
        assert_eq!(s, out);
    }

    #[test]
    fn noise_statistics_on_constant_speckle() {
        // sigma 0.1 over 10^4 pixels of a constant speckle: sample
        // std/mean within 0.1 ± 0.02.
        let s = SpecklePattern::new((100, 100), vec![3.0; 10_000]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let noisy = add_measurement_noise(&s, 0.1, &mut rng).unwrap();
        let mean = noisy.values().iter().sum::<f64>() / 10_000.0;
        let std = (noisy
            .values()
            .iter()
            .map(|v| (v - mean).powi(2))
            .sum::<f64>()
            / 10_000.0)
            .sqrt();
        let ratio = std / mean;
        assert!((ratio - 0.1).abs() < 0.02, "std/mean {ratio}");
    }

    #[test]
    fn noise_never_produces_negative_values() {
        let s = SpecklePattern::new((50, 50), vec![1.0; 2500]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Large sigma so that clamping actually fires.
        let noisy = add_measurement_noise(&s, 2.0, &mut rng).unwrap();
        assert!(noisy.values().iter().all(|&v| v >= 0.0));
        assert!(noisy.values().iter().any(|&v| v == 0.0), "expected clamps");
    }

    #[test]
    fn calibration_pairs_match_forward_intensity() {
        let tm = synth_tm(&FiberSpec::new((3, 3), (4, 4), 21).unwrap()).unwrap();
        let pairs = gen_calibration_set(&tm, 1, 0.5, 5).unwrap();
        assert_eq!(pairs.len(), 1);
        let (mask, speckle) = &pairs[0];
        assert_eq!(speckle, &forward_intensity(&tm, mask).unwrap());
    }

    #[test]
    fn calibration_replay_is_identical() {
        let tm = synth_tm(&FiberSpec::new((4, 4), (5, 5), 3).unwrap()).unwrap();
        let a = gen_calibration_set(&tm, 20, 0.5, 11).unwrap();
        let b = gen_calibration_set(&tm, 20, 0.5, 11).unwrap();
        assert_eq!(a, b);
        let c = gen_calibration_set(&tm, 20, 0.5, 12).unwrap();
        assert_ne!(a, c);
    }
}
