//! Desk-scale retrieval driver: plants a letter-Z image behind a random
//! transmission matrix, runs the solver and prints the convergence
//! trajectory. Handy for eyeballing hyperparameters.
//!
//! Usage: desk_run [seed] [max_generations] [in_side] [out_side]

use fiberga_core::builtin;
use fiberga_core::forward::forward_intensity;
use fiberga_core::ga::{GaConfig, GaRun};
use fiberga_core::sim::{synth_tm, FiberSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).map_or(0, |s| s.parse().unwrap());
    let max_gens: u64 = args.get(2).map_or(50_000, |s| s.parse().unwrap());
    let in_side: usize = args.get(3).map_or(12, |s| s.parse().unwrap());
    let out_side: usize = args.get(4).map_or(32, |s| s.parse().unwrap());

    let spec = FiberSpec::new((in_side, in_side), (out_side, out_side), seed).unwrap();
    let tm = synth_tm(&spec).unwrap();
    let truth = builtin::letter_z(spec.input_shape).unwrap();
    let target = forward_intensity(&tm, &truth).unwrap();

    let mut cfg = GaConfig::for_mask_shape(spec.input_shape);
    cfg.rng_seed = seed;
    cfg.max_generations = max_gens;
    if let Some(pop) = args.get(5) {
        cfg.population_size = pop.parse().unwrap();
    }
    if let Some(rate) = args.get(6) {
        cfg.mutation_rate = rate.parse().unwrap();
    }
    if let Some(block) = args.get(7) {
        let b: usize = block.parse().unwrap();
        cfg.crossover_block = (b, b);
    }

    let started = std::time::Instant::now();
    let mut ga = GaRun::new(&tm, &target, cfg, Some(&truth)).unwrap();
    while !ga.is_done() {
        let stats = ga.step().unwrap();
        if stats.generation % 1000 == 0 || ga.is_done() {
            println!(
                "gen {:>6}  best_cc1 {:.4}  mean_cc1 {:.4}  cc2 {:.4}  [{:.1}s]",
                stats.generation,
                stats.best_cc1,
                stats.mean_cc1,
                stats.best_cc2.unwrap_or(f64::NAN),
                started.elapsed().as_secs_f64(),
            );
        }
    }
    let outcome = ga.outcome();
    println!(
        "final cc1={} cc2={} generations={} degenerate={} elapsed={:.1}s",
        outcome.best_cc1,
        outcome.best_cc2.unwrap_or(f64::NAN),
        outcome.generations,
        outcome.degenerate_evals,
        started.elapsed().as_secs_f64(),
    );
}
