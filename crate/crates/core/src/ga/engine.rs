//! The generation loop: elitism, selection, crossover, mutation,
//! evaluation and metrics, plus checkpoint/resume.

use std::time::Instant;

use crate::corr::corr2;
use crate::error::{Error, Result};
use crate::pattern::{BinaryMask, SpecklePattern};
use crate::tm::TransmissionMatrix;

use super::metrics::{GenerationStats, RunMetrics};
use super::{
    crossover, init_population, mutate, rank_and_select_parents, stream_rng, Evaluator, GaConfig,
    Individual, Population, STREAM_OFFSPRING, STREAM_SELECT,
};

/// Final result of a run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best_mask: BinaryMask,
    pub best_cc1: f64,
    /// Correlation of the best mask against the ground truth, when one
    /// was supplied and the comparison is defined.
    pub best_cc2: Option<f64>,
    /// Completed generations (steps past the initial population).
    pub generations: u64,
    pub metrics: RunMetrics,
    /// Individuals whose computed speckle was constant, over the whole run.
    pub degenerate_evals: u64,
}

/// A genetic-algorithm run in progress.
///
/// Construction draws and evaluates the initial population; each
/// [`step`](Self::step) produces the next generation. The caller drives
/// the loop (or uses [`run_to_completion`](Self::run_to_completion)),
/// which keeps progress reporting and checkpointing in the caller's
/// hands.
#[derive(Debug)]
pub struct GaRun<'a> {
    cfg: GaConfig,
    mask_shape: (usize, usize),
    evaluator: Evaluator<'a>,
    ground_truth: Option<BinaryMask>,
    population: Population,
    generation: u64,
    best_mask: BinaryMask,
    best_cc1: f64,
    stats: Vec<GenerationStats>,
    degenerate_evals: u64,
}

impl<'a> GaRun<'a> {
    pub fn new(
        tm: &'a TransmissionMatrix,
        target: &'a SpecklePattern,
        cfg: GaConfig,
        ground_truth: Option<&BinaryMask>,
    ) -> Result<Self> {
        let mask_shape = tm.input_shape();
        cfg.validate(mask_shape)?;
        let evaluator = Evaluator::new(tm, target)?;
        if let Some(gt) = ground_truth {
            if gt.shape() != mask_shape {
                return Err(Error::ShapeMismatch {
                    expected: mask_shape,
                    got: gt.shape(),
                });
            }
        }

        let mut population = init_population(&cfg, mask_shape)?;
        let degenerate_evals = evaluator.evaluate(&mut population)?;
        let best_index = population.best_index().expect("evaluated population");
        let best = &population.individuals()[best_index];
        Ok(Self {
            cfg,
            mask_shape,
            evaluator,
            ground_truth: ground_truth.cloned(),
            best_mask: best.mask.clone(),
            best_cc1: best.fitness.unwrap(),
            population,
            generation: 0,
            stats: Vec::new(),
            degenerate_evals,
        })
    }

    pub fn config(&self) -> &GaConfig {
        &self.cfg
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    /// Completed generations so far.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn best(&self) -> (&BinaryMask, f64) {
        (&self.best_mask, self.best_cc1)
    }

    pub fn stats(&self) -> &[GenerationStats] {
        &self.stats
    }

    pub fn degenerate_evals(&self) -> u64 {
        self.degenerate_evals
    }

    /// True once the generation budget is spent or the target cost is
    /// reached.
    pub fn is_done(&self) -> bool {
        self.generation >= self.cfg.max_generations || self.best_cc1 >= self.cfg.target_cc1
    }

    /// Advances one generation: elites survive unchanged, the rest of the
    /// population is replaced by select → crossover → mutate offspring,
    /// then everything new is evaluated and the generation's statistics
    /// are recorded.
    pub fn step(&mut self) -> Result<GenerationStats> {
        let started = Instant::now();
        let next_gen = self.generation + 1;
        let seed = self.cfg.rng_seed;

        let mut selection_rng = stream_rng(seed, STREAM_SELECT, next_gen, 0);
        let pairs = rank_and_select_parents(&self.population, &self.cfg, &mut selection_rng)?;

        // Elites: best individuals, ties broken toward the lower index.
        let mut order: Vec<usize> = (0..self.population.len()).collect();
        let individuals = self.population.individuals();
        order.sort_by(|&a, &b| {
            let fa = individuals[a].fitness.expect("evaluated");
            let fb = individuals[b].fitness.expect("evaluated");
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        let mut next: Vec<Individual> = order[..self.cfg.elite_count]
            .iter()
            .map(|&i| individuals[i].clone())
            .collect();

        for (slot, &(pa, pb)) in pairs.iter().enumerate() {
            let mut rng = stream_rng(seed, STREAM_OFFSPRING, next_gen, slot as u64);
            let child = crossover(
                &individuals[pa].mask,
                &individuals[pb].mask,
                self.cfg.crossover_block,
                &mut rng,
            )?;
            let child = mutate(&child, self.cfg.mutation_rate, &mut rng)?;
            next.push(Individual {
                mask: child,
                fitness: None,
            });
        }

        let mut next = Population::from_individuals(next);
        self.degenerate_evals += self.evaluator.evaluate(&mut next)?;
        self.population = next;
        self.generation = next_gen;

        let best_index = self.population.best_index().expect("evaluated population");
        let best = &self.population.individuals()[best_index];
        let best_fitness = best.fitness.unwrap();
        if best_fitness > self.best_cc1 {
            self.best_cc1 = best_fitness;
            self.best_mask = best.mask.clone();
        }

        // Summation rounding can push the mean one ulp past the maximum
        // when the population is near-uniform; the mean can never truly
        // exceed the best, so pin it there.
        let mean_cc1 = self.population.mean_fitness().unwrap().min(best_fitness);
        let stats = GenerationStats {
            generation: next_gen,
            best_cc1: best_fitness,
            mean_cc1,
            best_cc2: self.cc2_of(&best.mask.clone()),
            wall_time: started.elapsed().as_secs_f64(),
        };
        self.stats.push(stats.clone());
        Ok(stats)
    }

    /// Correlation of a mask against the ground truth, when defined.
    fn cc2_of(&self, mask: &BinaryMask) -> Option<f64> {
        let gt = self.ground_truth.as_ref()?;
        corr2(mask, gt).ok()
    }

    /// Runs until the budget is exhausted or the target cost is reached.
    pub fn run_to_completion(&mut self) -> Result<RunOutcome> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(self.outcome())
    }

    pub fn outcome(&self) -> RunOutcome {
        RunOutcome {
            best_mask: self.best_mask.clone(),
            best_cc1: self.best_cc1,
            best_cc2: self.cc2_of(&self.best_mask),
            generations: self.generation,
            metrics: RunMetrics {
                rows: self.stats.clone(),
            },
            degenerate_evals: self.degenerate_evals,
        }
    }

    pub(super) fn checkpoint_parts(
        &self,
    ) -> (
        &GaConfig,
        (usize, usize),
        u64,
        u64,
        (&BinaryMask, f64),
        &Population,
        &[GenerationStats],
    ) {
        (
            &self.cfg,
            self.mask_shape,
            self.generation,
            self.degenerate_evals,
            (&self.best_mask, self.best_cc1),
            &self.population,
            &self.stats,
        )
    }

    /// Rebuilds a run from checkpoint state. The transmission matrix,
    /// target and ground truth are re-supplied by the caller; the
    /// checkpoint carries everything else, and the derived RNG streams
    /// make (seed, generation) a complete random state.
    pub(super) fn from_checkpoint_parts(
        tm: &'a TransmissionMatrix,
        target: &'a SpecklePattern,
        ground_truth: Option<&BinaryMask>,
        cfg: GaConfig,
        mask_shape: (usize, usize),
        generation: u64,
        degenerate_evals: u64,
        best: (BinaryMask, f64),
        population: Population,
        stats: Vec<GenerationStats>,
    ) -> Result<Self> {
        if tm.input_shape() != mask_shape {
            return Err(Error::ShapeMismatch {
                expected: mask_shape,
                got: tm.input_shape(),
            });
        }
        cfg.validate(mask_shape)?;
        let evaluator = Evaluator::new(tm, target)?;
        if population.len() != cfg.population_size {
            return Err(Error::Format(format!(
                "checkpoint population has {} individuals, config says {}",
                population.len(),
                cfg.population_size
            )));
        }
        if !population.all_evaluated() {
            return Err(Error::Format(
                "checkpoint population is not fully evaluated".into(),
            ));
        }
        if let Some(gt) = ground_truth {
            if gt.shape() != mask_shape {
                return Err(Error::ShapeMismatch {
                    expected: mask_shape,
                    got: gt.shape(),
                });
            }
        }
        Ok(Self {
            cfg,
            mask_shape,
            evaluator,
            ground_truth: ground_truth.cloned(),
            population,
            generation,
            best_mask: best.0,
            best_cc1: best.1,
            stats,
            degenerate_evals,
        })
    }
}

/// Convenience wrapper: build a run, drive it to completion, return the
/// outcome.
pub fn run(
    tm: &TransmissionMatrix,
    target: &SpecklePattern,
    cfg: GaConfig,
    ground_truth: Option<&BinaryMask>,
) -> Result<RunOutcome> {
    GaRun::new(tm, target, cfg, ground_truth)?.run_to_completion()
}
