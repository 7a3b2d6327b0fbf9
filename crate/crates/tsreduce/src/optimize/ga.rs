//! Generational genetic algorithm over integer timestamp chromosomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::representation::TimestampChromosome;

use super::{best_index, evaluate_batch, init_positions, OptimizerConfig, RunResult};

/// Runs a generational GA.
///
/// Each generation: rank the population by fitness (ascending, stable);
/// carry the best individual over unchanged; fill a mating pool of
/// max(2, round(sRate * popSize)) parents by rank-weighted roulette (rank r
/// from the top gets weight popSize - r); pair pool members cyclically, and
/// for each pair apply single-point crossover at a cut drawn in [1, nbp);
/// mutate each offspring gene with probability mRate by resampling it
/// uniformly in [1, n]; repair offspring to valid chromosomes; evaluate.
///
/// Per-generation draw order: the pool's roulette spins, then per offspring
/// pair one cut, then mutation draws gene by gene (first child fully, then
/// the second). All draws precede the batch evaluation.
pub fn ga_run(
    fitness: impl Fn(&TimestampChromosome) -> f64 + Sync,
    cfg: &OptimizerConfig,
    n: usize,
) -> Result<RunResult> {
    cfg.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut population = evaluate_batch(init_positions(cfg, n, &mut rng)?, n, &fitness)?;
    let mut history = Vec::with_capacity(cfg.n_gen + 1);
    history.push(population[best_index(&population)].fitness);

    let pool_size = ((cfg.s_rate * cfg.pop_size as f64).round() as usize).max(2);

    for _gen in 0..cfg.n_gen {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            population[a]
                .fitness
                .partial_cmp(&population[b].fitness)
                .expect("fitness values must be comparable")
        });
        let elite = population[order[0]].clone();

        // Rank-weighted roulette: weight popSize - rank, best rank first.
        let weights: Vec<f64> = (0..population.len())
            .map(|rank| (population.len() - rank) as f64)
            .collect();
        let total: f64 = weights.iter().sum();
        let mut pool = Vec::with_capacity(pool_size);
        for _ in 0..pool_size {
            let mut spin = rng.random_range(0.0..total);
            let mut chosen = order[population.len() - 1];
            for (rank, &idx) in order.iter().enumerate() {
                if spin < weights[rank] {
                    chosen = idx;
                    break;
                }
                spin -= weights[rank];
            }
            pool.push(chosen);
        }

        let wanted = cfg.pop_size - 1;
        let mut child_positions: Vec<Vec<f64>> = Vec::with_capacity(wanted + 1);
        let mut pair = 0usize;
        while child_positions.len() < wanted {
            let pa = &population[pool[(2 * pair) % pool_size]];
            let pb = &population[pool[(2 * pair + 1) % pool_size]];
            let (c1, c2) = super::crossover_mutate(&pa.position, &pb.position, cfg, n, &mut rng);
            child_positions.push(c1);
            if child_positions.len() < wanted {
                child_positions.push(c2);
            }
            pair += 1;
        }

        // Children carry integer-valued positions after repair so the
        // position/chromosome pairing stays exact.
        let mut children = evaluate_batch(child_positions, n, &fitness)?;
        for child in children.iter_mut() {
            child.position = child.chromosome.indices().iter().map(|&i| i as f64).collect();
        }

        population = std::iter::once(elite).chain(children).collect();
        let best = population[best_index(&population)].fitness;
        assert!(
            best <= *history.last().unwrap(),
            "elitism violated: best fitness rose from {} to {best}",
            history.last().unwrap()
        );
        history.push(best);
    }

    let best = population[best_index(&population)].clone();
    Ok(RunResult { best, history })
}
