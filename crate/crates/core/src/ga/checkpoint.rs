//! GAC1 checkpoint files: config, random state and current population.
//!
//! Layout, all little-endian after the 4-byte magic `"GAC1"` and a u32
//! version. The random state is just (seed, generation): every stream the
//! run will ever use is derived from those two numbers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pattern::{BinaryMask, SpecklePattern};
use crate::tm::TransmissionMatrix;

use super::engine::GaRun;
use super::metrics::GenerationStats;
use super::{GaConfig, Individual, ParentSelection, Population};

const MAGIC: &[u8; 4] = b"GAC1";
const VERSION: u32 = 1;

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u8(&mut self, v: u8) -> Result<()> {
        self.0.write_all(&[v])?;
        Ok(())
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.0.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.0.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.0.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn bytes(&mut self, v: &[u8]) -> Result<()> {
        self.0.write_all(v)?;
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.0.read_exact(&mut b)?;
        Ok(b[0])
    }
    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.0.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn f64(&mut self) -> Result<f64> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }
    fn bytes(&mut self, len: usize) -> Result<Vec<u8>> {
        let mut v = vec![0u8; len];
        self.0.read_exact(&mut v)?;
        Ok(v)
    }
}

fn write_mask<W: Write>(w: &mut Writer<W>, mask: &BinaryMask) -> Result<()> {
    w.bytes(mask.bits())
}

fn read_mask<R: Read>(r: &mut Reader<R>, shape: (usize, usize)) -> Result<BinaryMask> {
    let bits = r.bytes(shape.0 * shape.1)?;
    BinaryMask::new(shape, bits).map_err(|e| Error::Format(format!("checkpoint mask: {e}")))
}

impl GaRun<'_> {
    pub fn save_checkpoint_to(&self, out: impl Write) -> Result<()> {
        let (cfg, mask_shape, generation, degenerate, best, population, stats) =
            self.checkpoint_parts();
        let mut w = Writer(out);
        w.bytes(MAGIC)?;
        w.u32(VERSION)?;

        w.u32(cfg.population_size as u32)?;
        w.f64(cfg.on_ratio)?;
        w.u32(match cfg.parent_selection {
            ParentSelection::RankLinear => 0,
        })?;
        w.u32(cfg.crossover_block.0 as u32)?;
        w.u32(cfg.crossover_block.1 as u32)?;
        w.f64(cfg.mutation_rate)?;
        w.u32(cfg.elite_count as u32)?;
        w.u64(cfg.max_generations)?;
        w.f64(cfg.target_cc1)?;
        w.u64(cfg.rng_seed)?;

        w.u32(mask_shape.0 as u32)?;
        w.u32(mask_shape.1 as u32)?;
        // (rng_seed, generation) is the complete random state.
        w.u64(generation)?;
        w.u64(degenerate)?;

        write_mask(&mut w, best.0)?;
        w.f64(best.1)?;

        w.u32(population.len() as u32)?;
        for ind in population.individuals() {
            write_mask(&mut w, &ind.mask)?;
            match ind.fitness {
                Some(f) => {
                    w.u8(1)?;
                    w.f64(f)?;
                }
                None => {
                    w.u8(0)?;
                    w.f64(0.0)?;
                }
            }
        }

        w.u64(stats.len() as u64)?;
        for s in stats {
            w.u64(s.generation)?;
            w.f64(s.best_cc1)?;
            w.f64(s.mean_cc1)?;
            match s.best_cc2 {
                Some(v) => {
                    w.u8(1)?;
                    w.f64(v)?;
                }
                None => {
                    w.u8(0)?;
                    w.f64(0.0)?;
                }
            }
            w.f64(s.wall_time)?;
        }
        Ok(())
    }

    pub fn save_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save_checkpoint_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn resume_from<'a>(
        input: impl Read,
        tm: &'a TransmissionMatrix,
        target: &'a SpecklePattern,
        ground_truth: Option<&BinaryMask>,
    ) -> Result<GaRun<'a>> {
        let mut r = Reader(input);
        let magic = r.bytes(4)?;
        if magic != MAGIC {
            return Err(Error::Format(format!(
                "bad checkpoint magic {magic:?}, expected {MAGIC:?}"
            )));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported checkpoint version {version}"
            )));
        }

        let population_size = r.u32()? as usize;
        let on_ratio = r.f64()?;
        let parent_selection = match r.u32()? {
            0 => ParentSelection::RankLinear,
            other => {
                return Err(Error::Format(format!(
                    "unknown selection scheme id {other}"
                )))
            }
        };
        let crossover_block = (r.u32()? as usize, r.u32()? as usize);
        let mutation_rate = r.f64()?;
        let elite_count = r.u32()? as usize;
        let max_generations = r.u64()?;
        let target_cc1 = r.f64()?;
        let rng_seed = r.u64()?;
        let cfg = GaConfig {
            population_size,
            on_ratio,
            parent_selection,
            crossover_block,
            mutation_rate,
            elite_count,
            max_generations,
            target_cc1,
            rng_seed,
        };

        let mask_shape = (r.u32()? as usize, r.u32()? as usize);
        let generation = r.u64()?;
        let degenerate = r.u64()?;

        let best_mask = read_mask(&mut r, mask_shape)?;
        let best_cc1 = r.f64()?;

        let count = r.u32()? as usize;
        if count != population_size {
            return Err(Error::Format(format!(
                "checkpoint lists {count} individuals but config says {population_size}"
            )));
        }
        let mut individuals = Vec::with_capacity(count);
        for _ in 0..count {
            let mask = read_mask(&mut r, mask_shape)?;
            let has_fitness = r.u8()? == 1;
            let fitness = r.f64()?;
            individuals.push(Individual {
                mask,
                fitness: has_fitness.then_some(fitness),
            });
        }

        let rows = r.u64()? as usize;
        let mut stats = Vec::with_capacity(rows);
        for _ in 0..rows {
            let generation = r.u64()?;
            let best_cc1 = r.f64()?;
            let mean_cc1 = r.f64()?;
            let has_cc2 = r.u8()? == 1;
            let cc2 = r.f64()?;
            let wall_time = r.f64()?;
            stats.push(GenerationStats {
                generation,
                best_cc1,
                mean_cc1,
                best_cc2: has_cc2.then_some(cc2),
                wall_time,
            });
        }

        GaRun::from_checkpoint_parts(
            tm,
            target,
            ground_truth,
            cfg,
            mask_shape,
            generation,
            degenerate,
            (best_mask, best_cc1),
            Population::from_individuals(individuals),
            stats,
        )
    }

    pub fn resume_from_file<'a>(
        path: impl AsRef<Path>,
        tm: &'a TransmissionMatrix,
        target: &'a SpecklePattern,
        ground_truth: Option<&BinaryMask>,
    ) -> Result<GaRun<'a>> {
        Self::resume_from(BufReader::new(File::open(path)?), tm, target, ground_truth)
    }
}
