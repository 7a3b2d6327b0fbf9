//! Particle swarm optimization with a linearly decaying inertia weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::representation::TimestampChromosome;

use super::{evaluate_batch, inertia, init_positions, Candidate, OptimizerConfig, RunResult};

/// Runs PSO.
///
/// Velocity update: v' = w*v + aG*rG*(gbest - x) + aL*rL*(pbest - x), with
/// rG, rL drawn uniformly in (0,1) per particle per dimension per step and
/// w = (nGen - cGen)/nGen for the update leaving generation cGen (the first
/// update uses 1.0). Positions move by the new velocity and are repaired to
/// valid chromosomes before evaluation. Personal and global bests update
/// only on strict improvement, so the global-best history is non-increasing
/// by construction.
///
/// Per-generation draw order: particles in index order, dimensions in order,
/// rG before rL. Initial velocities are drawn uniformly in (-1, 1) per
/// dimension after all initial positions. All draws precede the batch
/// evaluation.
///
/// Positions are kept inside [1, n] by absorbing walls: a coordinate moving
/// past either bound is clamped there and its velocity component reset to
/// zero, so particles cannot drift far outside the box and stall against
/// the decode-stage clamp.
pub fn pso_run(
    fitness: impl Fn(&TimestampChromosome) -> f64 + Sync,
    cfg: &OptimizerConfig,
    n: usize,
) -> Result<RunResult> {
    cfg.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let positions = init_positions(cfg, n, &mut rng)?;
    let mut velocities: Vec<Vec<f64>> = (0..cfg.pop_size)
        .map(|_| (0..cfg.nbp).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();

    let mut particles = evaluate_batch(positions, n, &fitness)?;
    let mut personal_best: Vec<Candidate> = particles.clone();
    let mut global_best = personal_best[0].clone();
    for p in &personal_best[1..] {
        if p.fitness < global_best.fitness {
            global_best = p.clone();
        }
    }
    let mut history = Vec::with_capacity(cfg.n_gen + 1);
    history.push(global_best.fitness);

    for gen in 0..cfg.n_gen {
        let w = inertia(cfg.n_gen, gen);
        let mut next_positions = Vec::with_capacity(cfg.pop_size);
        for (i, particle) in particles.iter().enumerate() {
            let v = &mut velocities[i];
            let mut x = particle.position.clone();
            for j in 0..cfg.nbp {
                let r_global = rng.random::<f64>();
                let r_local = rng.random::<f64>();
                v[j] = w * v[j]
                    + cfg.accel_global * r_global * (global_best.position[j] - x[j])
                    + cfg.accel_local * r_local * (personal_best[i].position[j] - x[j]);
                x[j] += v[j];
                if x[j] < 1.0 {
                    x[j] = 1.0;
                    v[j] = 0.0;
                } else if x[j] > n as f64 {
                    x[j] = n as f64;
                    v[j] = 0.0;
                }
            }
            next_positions.push(x);
        }

        particles = evaluate_batch(next_positions, n, &fitness)?;
        for (i, particle) in particles.iter().enumerate() {
            if particle.fitness < personal_best[i].fitness {
                personal_best[i] = particle.clone();
            }
            if particle.fitness < global_best.fitness {
                global_best = particle.clone();
            }
        }
        assert!(
            global_best.fitness <= *history.last().unwrap(),
            "global best regressed to {}",
            global_best.fitness
        );
        history.push(global_best.fitness);
    }

    Ok(RunResult {
        best: global_best,
        history,
    })
}
