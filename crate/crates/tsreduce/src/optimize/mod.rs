//! Nature-inspired optimizers over timestamp chromosomes.
//!
//! All four optimizers share one structure: a population of continuous
//! positions of length nbp, decoded to valid [`TimestampChromosome`]s by
//! [`decode_repair`] before every fitness evaluation. GA works directly on
//! integer-valued positions; DE and PSO move through continuous space.
//!
//! Determinism contract: each run owns a single seeded generator, and every
//! stochastic draw happens sequentially in a documented order *before* the
//! generation's fitness evaluations are dispatched. Evaluations are pure, so
//! they may run in parallel without affecting results; a run is bit-identical
//! for a given (config, seed, fitness) at any thread count.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::representation::TimestampChromosome;

mod de;
mod ga;
mod nsga2;
mod pso;

pub use de::de_run;
pub use ga::ga_run;
pub use nsga2::{
    crowding_distance, nondominated_sort, nsga2_run, select_final, MultiCandidate, Nsga2Result,
    ParetoArchive, ParetoMember,
};
pub use pso::pso_run;

/// Control parameters for every optimizer. Defaults follow the published
/// reference configuration; fields irrelevant to a given optimizer are
/// simply unused by it.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Population size (popSize).
    pub pop_size: usize,
    /// Number of generations (nGen).
    pub n_gen: usize,
    /// Chromosome length (nbp).
    pub nbp: usize,
    /// GA selection rate (sRate): fraction of the population entering the
    /// mating pool.
    pub s_rate: f64,
    /// GA per-gene mutation rate (mRate).
    pub m_rate: f64,
    /// DE differential weight (F).
    pub diff_weight: f64,
    /// DE crossover constant (Cr).
    pub crossover_rate: f64,
    /// PSO local (cognitive) acceleration aL.
    pub accel_local: f64,
    /// PSO global (social) acceleration aG.
    pub accel_global: f64,
    /// RNG seed for the run.
    pub seed: u64,
}

impl OptimizerConfig {
    /// The reference parameter set: popSize 16, nGen 100, sRate 0.5,
    /// mRate 0.2, F 0.9, Cr 0.5, aL = aG = 2.
    pub fn defaults(nbp: usize, seed: u64) -> Self {
        OptimizerConfig {
            pop_size: 16,
            n_gen: 100,
            nbp,
            s_rate: 0.5,
            m_rate: 0.2,
            diff_weight: 0.9,
            crossover_rate: 0.5,
            accel_local: 2.0,
            accel_global: 2.0,
            seed,
        }
    }

    /// Checks the config against a target series length.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.pop_size < 1 {
            return Err(Error::contract("population size must be at least 1"));
        }
        if self.nbp < 2 || self.nbp > n {
            return Err(Error::contract(format!(
                "nbp {} outside [2, {n}]",
                self.nbp
            )));
        }
        if !(self.s_rate > 0.0 && self.s_rate <= 1.0) {
            return Err(Error::contract(format!(
                "sRate {} outside (0, 1]",
                self.s_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.m_rate) {
            return Err(Error::contract(format!(
                "mRate {} outside [0, 1]",
                self.m_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::contract(format!(
                "Cr {} outside [0, 1]",
                self.crossover_rate
            )));
        }
        if !self.diff_weight.is_finite()
            || !self.accel_local.is_finite()
            || !self.accel_global.is_finite()
        {
            return Err(Error::contract("F, aL, aG must be finite"));
        }
        Ok(())
    }
}

/// One evaluated individual: continuous position, its decoded chromosome,
/// and the fitness of that chromosome.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub chromosome: TimestampChromosome,
    pub fitness: f64,
}

/// Output of a single-objective optimizer run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Candidate,
    /// Best fitness after initialization (index 0) and after each
    /// generation; length n_gen + 1, non-increasing.
    pub history: Vec<f64>,
}

/// Decodes a continuous position into a valid chromosome: round to nearest
/// integer, clamp to [1, n], sort ascending, and shift duplicates to the
/// nearest unused integer (preferring upward, then downward). Idempotent on
/// already-valid integer positions.
pub fn decode_repair(position: &[f64], n: usize) -> Result<TimestampChromosome> {
    let nbp = position.len();
    if nbp > n {
        return Err(Error::contract(format!(
            "cannot place {nbp} distinct timestamps in [1, {n}]"
        )));
    }
    let mut vals: Vec<usize> = position
        .iter()
        .map(|&x| {
            if !x.is_finite() {
                return Err(Error::contract(format!("non-finite position value {x}")));
            }
            Ok((x.round().max(1.0).min(n as f64)) as usize)
        })
        .collect::<Result<_>>()?;
    vals.sort_unstable();

    let mut used = vec![false; n + 1];
    let mut out = Vec::with_capacity(nbp);
    for v in vals {
        if !used[v] {
            used[v] = true;
            out.push(v);
            continue;
        }
        let mut step = 1;
        loop {
            if v + step <= n && !used[v + step] {
                used[v + step] = true;
                out.push(v + step);
                break;
            }
            if v > step && !used[v - step] {
                used[v - step] = true;
                out.push(v - step);
                break;
            }
            step += 1;
        }
    }
    out.sort_unstable();
    TimestampChromosome::new(out, n)
}

/// Samples nbp distinct timestamps uniformly without replacement, sorted.
pub fn random_chromosome(
    n: usize,
    nbp: usize,
    rng: &mut impl Rng,
) -> Result<TimestampChromosome> {
    if nbp > n {
        return Err(Error::contract(format!(
            "cannot sample {nbp} distinct timestamps from [1, {n}]"
        )));
    }
    let mut indices: Vec<usize> = rand::seq::index::sample(rng, n, nbp)
        .iter()
        .map(|i| i + 1)
        .collect();
    indices.sort_unstable();
    TimestampChromosome::new(indices, n)
}

/// PSO inertia schedule: (nGen - cGen) / nGen, so the first update uses 1.0
/// and the weight decays linearly to 0 at cGen = nGen.
pub fn inertia(n_gen: usize, current_gen: usize) -> f64 {
    (n_gen as f64 - current_gen as f64) / n_gen as f64
}

/// Initial population shared by all optimizers: random chromosomes carried
/// as continuous positions.
pub(crate) fn init_positions(
    cfg: &OptimizerConfig,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    (0..cfg.pop_size)
        .map(|_| {
            let c = random_chromosome(n, cfg.nbp, rng)?;
            Ok(c.indices().iter().map(|&i| i as f64).collect())
        })
        .collect()
}

/// Decodes and evaluates a batch of positions. Decoding happens up front;
/// the pure fitness calls then run in parallel in input order. The decoded
/// chromosome is re-checked here so every evaluated individual is known
/// valid (the fitness adapter assertion).
pub(crate) fn evaluate_batch(
    positions: Vec<Vec<f64>>,
    n: usize,
    fitness: &(impl Fn(&TimestampChromosome) -> f64 + Sync),
) -> Result<Vec<Candidate>> {
    let decoded: Vec<(Vec<f64>, TimestampChromosome)> = positions
        .into_iter()
        .map(|p| {
            let c = decode_repair(&p, n)?;
            assert_chromosome_valid(&c, n);
            Ok((p, c))
        })
        .collect::<Result<_>>()?;
    Ok(decoded
        .into_par_iter()
        .map(|(position, chromosome)| {
            let fitness = fitness(&chromosome);
            Candidate {
                position,
                chromosome,
                fitness,
            }
        })
        .collect())
}

/// Runtime assertion that a chromosome handed to a fitness function is
/// structurally valid.
pub(crate) fn assert_chromosome_valid(c: &TimestampChromosome, n: usize) {
    assert!(c.n() == n, "chromosome n {} does not match series n {n}", c.n());
    assert!(
        c.len() >= 2 && c.len() <= n,
        "chromosome length {} outside [2, {n}]",
        c.len()
    );
    let idx = c.indices();
    assert!(idx[0] >= 1 && idx[idx.len() - 1] <= n, "index out of range");
    assert!(
        idx.windows(2).all(|w| w[0] < w[1]),
        "indices not strictly ascending"
    );
}

/// Single-point crossover plus per-gene mutation, shared by the GA and
/// NSGA-II. Draw order: one cut in [1, nbp), then mutation draws gene by
/// gene over the first child, then the second.
pub(crate) fn crossover_mutate(
    pa: &[f64],
    pb: &[f64],
    cfg: &OptimizerConfig,
    n: usize,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let cut = rng.random_range(1..cfg.nbp);
    let mut c1: Vec<f64> = pa[..cut].iter().chain(&pb[cut..]).copied().collect();
    let mut c2: Vec<f64> = pb[..cut].iter().chain(&pa[cut..]).copied().collect();
    for child in [&mut c1, &mut c2] {
        for gene in child.iter_mut() {
            if rng.random::<f64>() < cfg.m_rate {
                *gene = rng.random_range(1..=n) as f64;
            }
        }
    }
    (c1, c2)
}

/// Index of the candidate with minimum fitness, ties to the lowest index.
pub(crate) fn best_index(candidates: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.fitness < candidates[best].fitness {
            best = i;
        }
    }
    best
}
