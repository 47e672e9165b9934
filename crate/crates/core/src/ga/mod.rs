//! Genetic algorithm over binary masks: population management, fitness
//! against a target speckle, rank-weighted parent selection, rectangular
//! block crossover, per-pixel mutation, and the generation loop.
//!
//! All randomness flows from one 64-bit master seed through per-purpose
//! ChaCha streams keyed by (purpose, generation, slot). Fitness evaluation
//! consumes no randomness at all, so results are bit-identical under any
//! degree of evaluation parallelism, and a run can resume from a
//! checkpoint knowing only the seed and the generation counter.

mod checkpoint;
mod engine;
mod metrics;

pub use engine::{run, GaRun, RunOutcome};
pub use metrics::{GenerationStats, RunMetrics};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corr::corr2;
use crate::error::{Error, Result};
use crate::forward::ColumnMajorTm;
use crate::pattern::{BinaryMask, SpecklePattern};
use crate::tm::TransmissionMatrix;

/// Hard cap keeping the (generation, slot) stream encoding collision-free.
pub const MAX_POPULATION: usize = 1 << 20;
/// Generation indices must fit the stream encoding as well.
pub const MAX_GENERATIONS: u64 = 1 << 36;

const STREAM_INIT: u64 = 1;
const STREAM_SELECT: u64 = 2;
const STREAM_OFFSPRING: u64 = 3;

/// Independent ChaCha stream for one (purpose, generation, slot) triple.
fn stream_rng(seed: u64, purpose: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    debug_assert!(generation < MAX_GENERATIONS);
    debug_assert!((slot as u64) < (1 << 20));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 56) | (generation << 20) | slot);
    rng
}

/// Parent-selection scheme. Only rank-linear weighting is implemented:
/// with R individuals, rank r (best = 1) carries weight R − r + 1; equal
/// fitness values share the average weight of the ranks they span, so
/// selection never depends on how ties are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParentSelection {
    #[default]
    RankLinear,
}

/// Hyperparameters of one GA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    /// Probability that a pixel of an initial mask is ON.
    pub on_ratio: f64,
    pub parent_selection: ParentSelection,
    /// Upper bounds (height, width) of the crossover block.
    pub crossover_block: (usize, usize),
    /// Per-pixel flip probability applied to every offspring.
    pub mutation_rate: f64,
    /// Number of top individuals copied unchanged each generation.
    pub elite_count: usize,
    pub max_generations: u64,
    /// Early-stop threshold on the best cost value.
    pub target_cc1: f64,
    pub rng_seed: u64,
}

impl GaConfig {
    /// Defaults for a given mask shape: population 30, 50:50 ON ratio,
    /// crossover blocks up to half the mask in each dimension, mutation
    /// 0.005, two elites, a 60 000-generation budget.
    pub fn for_mask_shape(mask_shape: (usize, usize)) -> Self {
        Self {
            population_size: 30,
            on_ratio: 0.5,
            parent_selection: ParentSelection::RankLinear,
            crossover_block: ((mask_shape.0 / 2).max(1), (mask_shape.1 / 2).max(1)),
            mutation_rate: 0.005,
            elite_count: 2,
            max_generations: 60_000,
            target_cc1: 0.999,
            rng_seed: 0,
        }
    }

    pub fn validate(&self, mask_shape: (usize, usize)) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidConfig(msg));
        let (h, w) = mask_shape;
        if h * w < 2 {
            return err(format!("mask shape {mask_shape:?} has fewer than 2 pixels"));
        }
        if self.population_size < 2 {
            return err(format!(
                "population size must be at least 2, got {}",
                self.population_size
            ));
        }
        if self.population_size > MAX_POPULATION {
            return err(format!(
                "population size {} exceeds the {} cap",
                self.population_size, MAX_POPULATION
            ));
        }
        if self.elite_count >= self.population_size {
            return err(format!(
                "elite count {} must be smaller than the population {}",
                self.elite_count, self.population_size
            ));
        }
        if !(self.on_ratio > 0.0 && self.on_ratio < 1.0) {
            return err(format!(
                "on ratio must lie strictly inside (0, 1), got {}",
                self.on_ratio
            ));
        }
        if !(0.0..1.0).contains(&self.mutation_rate) {
            return err(format!(
                "mutation rate must lie in [0, 1), got {}",
                self.mutation_rate
            ));
        }
        let (bh, bw) = self.crossover_block;
        if bh == 0 || bw == 0 || bh > h || bw > w {
            return err(format!(
                "crossover block {:?} does not fit mask shape {mask_shape:?}",
                self.crossover_block
            ));
        }
        if self.max_generations > MAX_GENERATIONS {
            return err(format!(
                "generation budget {} exceeds the {} cap",
                self.max_generations, MAX_GENERATIONS
            ));
        }
        if !(self.target_cc1 > 0.0 && self.target_cc1 <= 1.0) {
            return err(format!(
                "target cost must lie in (0, 1], got {}",
                self.target_cc1
            ));
        }
        Ok(())
    }
}

/// One candidate mask, with its cost value once evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub mask: BinaryMask,
    pub fitness: Option<f64>,
}

/// The evolving set of candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    individuals: Vec<Individual>,
}

impl Population {
    pub fn from_individuals(individuals: Vec<Individual>) -> Self {
        Self { individuals }
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn all_evaluated(&self) -> bool {
        self.individuals.iter().all(|ind| ind.fitness.is_some())
    }

    /// Index of the best evaluated individual; earlier index wins ties.
    pub fn best_index(&self) -> Option<usize> {
        self.individuals
            .iter()
            .enumerate()
            .filter_map(|(i, ind)| ind.fitness.map(|f| (i, f)))
            .max_by(|(ia, fa), (ib, fb)| fa.total_cmp(fb).then(ib.cmp(ia)))
            .map(|(i, _)| i)
    }

    pub fn mean_fitness(&self) -> Option<f64> {
        if self.individuals.is_empty() || !self.all_evaluated() {
            return None;
        }
        let sum: f64 = self.individuals.iter().map(|i| i.fitness.unwrap()).sum();
        Some(sum / self.individuals.len() as f64)
    }
}

/// Random initial population: every pixel of every mask is independently
/// ON with probability `on_ratio`. Reproducible from the config seed.
pub fn init_population(cfg: &GaConfig, mask_shape: (usize, usize)) -> Result<Population> {
    cfg.validate(mask_shape)?;
    let n = mask_shape.0 * mask_shape.1;
    let individuals = (0..cfg.population_size)
        .map(|slot| {
            let mut rng = stream_rng(cfg.rng_seed, STREAM_INIT, 0, slot as u64);
            let bits = (0..n).map(|_| rng.random_bool(cfg.on_ratio) as u8).collect();
            Individual {
                mask: BinaryMask::from_bits_unchecked(mask_shape, bits),
                fitness: None,
            }
        })
        .collect();
    Ok(Population { individuals })
}

/// Precomputed state for repeated fitness evaluation against one target:
/// a column-major matrix copy plus the target pattern.
#[derive(Debug)]
pub struct Evaluator<'a> {
    columns: ColumnMajorTm,
    target: &'a SpecklePattern,
}

impl<'a> Evaluator<'a> {
    pub fn new(tm: &TransmissionMatrix, target: &'a SpecklePattern) -> Result<Self> {
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
        Ok(Self {
            columns: ColumnMajorTm::from_matrix(tm),
            target,
        })
    }

    pub fn mask_len(&self) -> usize {
        self.columns.cols()
    }

    /// Fills in the fitness of every unevaluated individual:
    /// `corr2(forward_intensity(tm, mask), target)`. Individuals whose
    /// computed speckle is constant get fitness −1 instead of killing the
    /// run; the returned counter says how many were hit this call.
    pub fn evaluate(&self, pop: &mut Population) -> Result<u64> {
        let pending: Vec<usize> = pop
            .individuals
            .iter()
            .enumerate()
            .filter(|(_, ind)| ind.fitness.is_none())
            .map(|(i, _)| i)
            .collect();
        if pending.is_empty() {
            return Ok(0);
        }

        let masks: Vec<&BinaryMask> = pending.iter().map(|&i| &pop.individuals[i].mask).collect();
        let speckles = self.columns.forward_intensities_batch(&masks)?;

        let mut degenerate = 0u64;
        for (&i, speckle) in pending.iter().zip(&speckles) {
            let fitness = match corr2(speckle, self.target) {
                Ok(v) => v,
                Err(Error::DegenerateVariance(_)) => {
                    degenerate += 1;
                    -1.0
                }
                Err(e) => return Err(e),
            };
            pop.individuals[i].fitness = Some(fitness);
        }
        Ok(degenerate)
    }
}

/// One-shot convenience wrapper over [`Evaluator`]; returns the number of
/// degenerate (constant-speckle) individuals encountered.
pub fn evaluate(
    pop: &mut Population,
    tm: &TransmissionMatrix,
    target: &SpecklePattern,
) -> Result<u64> {
    Evaluator::new(tm, target)?.evaluate(pop)
}

/// Raw rank-linear weights for `n` ranks, best first: n, n−1, …, 1.
pub fn rank_linear_weights(n: usize) -> Vec<f64> {
    (0..n).map(|pos| (n - pos) as f64).collect()
}

/// Per-individual selection weight, indexed like the population. Tied
/// fitness values share the average weight of the ranks they span.
fn selection_weights(pop: &Population) -> Result<Vec<f64>> {
    let n = pop.len();
    let fitness: Vec<f64> = pop
        .individuals
        .iter()
        .map(|ind| {
            ind.fitness
                .ok_or(Error::InvalidConfig("population not fully evaluated".into()))
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));

    let raw = rank_linear_weights(n);
    let mut weights = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && fitness[order[j]] == fitness[order[i]] {
            j += 1;
        }
        let avg = raw[i..j].iter().sum::<f64>() / (j - i) as f64;
        for &idx in &order[i..j] {
            weights[idx] = avg;
        }
        i = j;
    }
    Ok(weights)
}

fn weighted_draw(cumulative: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cumulative.last().expect("non-empty weights");
    let u = rng.random_range(0.0..total);
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

/// Draws `population_size − elite_count` parent pairs with rank-linear
/// probabilities. The two members of a pair are always distinct
/// individuals.
pub fn rank_and_select_parents(
    pop: &Population,
    cfg: &GaConfig,
    rng: &mut impl Rng,
) -> Result<Vec<(usize, usize)>> {
    if pop.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "cannot select parents from a population of {}",
            pop.len()
        )));
    }
    let weights = selection_weights(pop)?;
    let mut cumulative = weights.clone();
    for i in 1..cumulative.len() {
        cumulative[i] += cumulative[i - 1];
    }

    let pairs = pop.len().saturating_sub(cfg.elite_count);
    let mut out = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let a = weighted_draw(&cumulative, rng);
        let b = loop {
            let candidate = weighted_draw(&cumulative, rng);
            if candidate != a {
                break candidate;
            }
        };
        out.push((a, b));
    }
    Ok(out)
}

fn paste_block(
    parent_a: &BinaryMask,
    parent_b: &BinaryMask,
    top: usize,
    left: usize,
    block_h: usize,
    block_w: usize,
) -> BinaryMask {
    let (_, w) = parent_a.shape();
    let mut child = parent_a.clone();
    for r in top..top + block_h {
        let bits = child.bits_mut();
        for c in left..left + block_w {
            bits[r * w + c] = parent_b.get(r, c);
        }
    }
    child
}

/// Replaces one uniformly placed rectangular block of `parent_a` with the
/// corresponding pixels of `parent_b`. Block dimensions are uniform in
/// `[1, max_block.0] × [1, max_block.1]`.
pub fn crossover(
    parent_a: &BinaryMask,
    parent_b: &BinaryMask,
    max_block: (usize, usize),
    rng: &mut impl Rng,
) -> Result<BinaryMask> {
    if parent_a.shape() != parent_b.shape() {
        return Err(Error::ShapeMismatch {
            expected: parent_a.shape(),
            got: parent_b.shape(),
        });
    }
    let (h, w) = parent_a.shape();
    let (max_h, max_w) = max_block;
    if max_h == 0 || max_w == 0 || max_h > h || max_w > w {
        return Err(Error::InvalidConfig(format!(
            "crossover block bound {max_block:?} does not fit mask shape {:?}",
            parent_a.shape()
        )));
    }
    let block_h = rng.random_range(1..=max_h);
    let block_w = rng.random_range(1..=max_w);
    let top = rng.random_range(0..=h - block_h);
    let left = rng.random_range(0..=w - block_w);
    Ok(paste_block(parent_a, parent_b, top, left, block_h, block_w))
}

/// Flips every pixel independently with probability `mutation_rate`.
pub fn mutate(mask: &BinaryMask, mutation_rate: f64, rng: &mut impl Rng) -> Result<BinaryMask> {
    if !(0.0..1.0).contains(&mutation_rate) {
        return Err(Error::Domain(format!(
            "mutation rate must lie in [0, 1), got {mutation_rate}"
        )));
    }
    let mut out = mask.clone();
    for bit in out.bits_mut() {
        if rng.random_bool(mutation_rate) {
            *bit ^= 1;
        }
    }
    Ok(out)
}
