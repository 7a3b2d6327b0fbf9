//! NSGA-II: fast non-dominated sorting, crowding distance, and the elitist
//! two-objective loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::representation::TimestampChromosome;

use super::{
    assert_chromosome_valid, crossover_mutate, decode_repair, init_positions, OptimizerConfig,
};

/// One evaluated individual under two minimized objectives.
#[derive(Debug, Clone)]
pub struct MultiCandidate {
    pub position: Vec<f64>,
    pub chromosome: TimestampChromosome,
    pub objectives: [f64; 2],
}

/// Archive member: a candidate together with its front rank (1-based; the
/// archive holds rank 1 only) and crowding distance.
#[derive(Debug, Clone)]
pub struct ParetoMember {
    pub candidate: MultiCandidate,
    pub rank: usize,
    pub crowding: f64,
}

/// The rank-1 set returned by a run. No member dominates another.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    members: Vec<ParetoMember>,
}

impl ParetoArchive {
    pub fn new(members: Vec<ParetoMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::contract("empty Pareto archive"));
        }
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if dominates(&a.candidate.objectives, &b.candidate.objectives)
                    || dominates(&b.candidate.objectives, &a.candidate.objectives)
                {
                    return Err(Error::contract(
                        "rank-1 archive contains a dominated member",
                    ));
                }
            }
        }
        Ok(ParetoArchive { members })
    }

    pub fn members(&self) -> &[ParetoMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Output of an NSGA-II run.
#[derive(Debug, Clone)]
pub struct Nsga2Result {
    pub archive: ParetoArchive,
    /// The archive member chosen by [`select_final`].
    pub selected: MultiCandidate,
    /// Per-generation minimum of each objective over the population,
    /// index 0 = after initialization; length n_gen + 1.
    pub history: Vec<[f64; 2]>,
}

/// True when `a` is no worse in both objectives and strictly better in one.
fn dominates(a: &[f64; 2], b: &[f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Fast non-dominated sort. Front 1 holds all candidates dominated by none;
/// front i+1 the candidates non-dominated once fronts <= i are removed.
/// Returns index lists, ascending within each front.
pub fn nondominated_sort(objectives: &[[f64; 2]]) -> Result<Vec<Vec<usize>>> {
    if objectives.is_empty() {
        return Err(Error::contract("non-dominated sort over an empty population"));
    }
    let n = objectives.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominator_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominated_by[i].push(j);
                dominator_count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated_by[j].push(i);
                dominator_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominator_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                dominator_count[j] -= 1;
                if dominator_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance for one front, aligned with `front` order. Boundary
/// members of each objective get infinity; interior members accumulate
/// (neighbor gap)/(objective range); a zero range contributes nothing.
pub fn crowding_distance(objectives: &[[f64; 2]], front: &[usize]) -> Vec<f64> {
    assert!(!front.is_empty(), "crowding distance over an empty front");
    let m = front.len();
    let mut distance = vec![0.0; m];
    for obj in 0..2 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            objectives[front[a]][obj]
                .partial_cmp(&objectives[front[b]][obj])
                .expect("objectives must be comparable")
                .then(a.cmp(&b))
        });
        distance[order[0]] = f64::INFINITY;
        distance[order[m - 1]] = f64::INFINITY;
        let lo = objectives[front[order[0]]][obj];
        let hi = objectives[front[order[m - 1]]][obj];
        let range = hi - lo;
        if range > 0.0 {
            for w in 1..m - 1 {
                let gap = objectives[front[order[w + 1]]][obj]
                    - objectives[front[order[w - 1]]][obj];
                distance[order[w]] += gap / range;
            }
        }
    }
    distance
}

fn evaluate_batch2(
    positions: Vec<Vec<f64>>,
    n: usize,
    fitness2: &(impl Fn(&TimestampChromosome) -> [f64; 2] + Sync),
) -> Result<Vec<MultiCandidate>> {
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
            let objectives = fitness2(&chromosome);
            MultiCandidate {
                position,
                chromosome,
                objectives,
            }
        })
        .collect())
}

/// Runs NSGA-II over two minimized objectives.
///
/// Each generation: popSize offspring are bred by binary tournament on
/// (rank, then crowding, then lower index), single-point crossover, and
/// per-gene mutation (the GA operators); parents and offspring are merged;
/// the merged pool is non-dominated sorted and the next generation filled
/// front by front, truncating the last front by descending crowding
/// distance. After nGen generations the rank-1 front of the final
/// population, deduplicated by chromosome, becomes the archive.
///
/// Per-generation draw order, offspring pair by pair: four tournament index
/// draws, one crossover cut, then mutation draws gene by gene (first child,
/// then second). All draws precede the batch evaluation.
pub fn nsga2_run(
    fitness2: impl Fn(&TimestampChromosome) -> [f64; 2] + Sync,
    cfg: &OptimizerConfig,
    n: usize,
) -> Result<Nsga2Result> {
    cfg.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut population = evaluate_batch2(init_positions(cfg, n, &mut rng)?, n, &fitness2)?;
    let (mut ranks, mut crowding) = rank_and_crowd(&population)?;
    let mut history = Vec::with_capacity(cfg.n_gen + 1);
    history.push(objective_minima(&population));

    for _gen in 0..cfg.n_gen {
        let mut child_positions = Vec::with_capacity(cfg.pop_size);
        while child_positions.len() < cfg.pop_size {
            let pa = tournament(&mut rng, &ranks, &crowding);
            let pb = tournament(&mut rng, &ranks, &crowding);
            let (c1, c2) = crossover_mutate(
                &population[pa].position,
                &population[pb].position,
                cfg,
                n,
                &mut rng,
            );
            child_positions.push(c1);
            if child_positions.len() < cfg.pop_size {
                child_positions.push(c2);
            }
        }
        let offspring = evaluate_batch2(child_positions, n, &fitness2)?;

        let mut merged = population;
        merged.extend(offspring);
        let objectives: Vec<[f64; 2]> = merged.iter().map(|c| c.objectives).collect();
        let fronts = nondominated_sort(&objectives)?;

        // Runtime check: the rank-1 front is mutually non-dominated.
        for (i, &a) in fronts[0].iter().enumerate() {
            for &b in &fronts[0][i + 1..] {
                assert!(
                    !dominates(&objectives[a], &objectives[b])
                        && !dominates(&objectives[b], &objectives[a]),
                    "rank-1 front contains a dominated member"
                );
            }
        }

        let mut next = Vec::with_capacity(cfg.pop_size);
        let mut next_ranks = Vec::with_capacity(cfg.pop_size);
        let mut next_crowding = Vec::with_capacity(cfg.pop_size);
        for (front_no, front) in fronts.iter().enumerate() {
            if next.len() == cfg.pop_size {
                break;
            }
            let dist = crowding_distance(&objectives, front);
            if next.len() + front.len() <= cfg.pop_size {
                for (&idx, &d) in front.iter().zip(&dist) {
                    next.push(merged[idx].clone());
                    next_ranks.push(front_no + 1);
                    next_crowding.push(d);
                }
            } else {
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| {
                    dist[b]
                        .partial_cmp(&dist[a])
                        .expect("crowding must be comparable")
                        .then(a.cmp(&b))
                });
                for &w in order.iter().take(cfg.pop_size - next.len()) {
                    next.push(merged[front[w]].clone());
                    next_ranks.push(front_no + 1);
                    next_crowding.push(dist[w]);
                }
            }
        }

        population = next;
        ranks = next_ranks;
        crowding = next_crowding;
        history.push(objective_minima(&population));
    }

    let objectives: Vec<[f64; 2]> = population.iter().map(|c| c.objectives).collect();
    let fronts = nondominated_sort(&objectives)?;
    let dist = crowding_distance(&objectives, &fronts[0]);
    let mut members = Vec::new();
    for (&idx, &d) in fronts[0].iter().zip(&dist) {
        if members
            .iter()
            .any(|m: &ParetoMember| m.candidate.chromosome == population[idx].chromosome)
        {
            continue;
        }
        members.push(ParetoMember {
            candidate: population[idx].clone(),
            rank: 1,
            crowding: d,
        });
    }
    let archive = ParetoArchive::new(members)?;
    let selected = select_final(&archive).candidate.clone();
    Ok(Nsga2Result {
        archive,
        selected,
        history,
    })
}

fn rank_and_crowd(population: &[MultiCandidate]) -> Result<(Vec<usize>, Vec<f64>)> {
    let objectives: Vec<[f64; 2]> = population.iter().map(|c| c.objectives).collect();
    let fronts = nondominated_sort(&objectives)?;
    let mut ranks = vec![0usize; population.len()];
    let mut crowding = vec![0.0f64; population.len()];
    for (front_no, front) in fronts.iter().enumerate() {
        let dist = crowding_distance(&objectives, front);
        for (&idx, &d) in front.iter().zip(&dist) {
            ranks[idx] = front_no + 1;
            crowding[idx] = d;
        }
    }
    Ok((ranks, crowding))
}

fn objective_minima(population: &[MultiCandidate]) -> [f64; 2] {
    let mut minima = [f64::INFINITY; 2];
    for c in population {
        for k in 0..2 {
            minima[k] = minima[k].min(c.objectives[k]);
        }
    }
    minima
}

/// Binary tournament: two uniform index draws; the lower rank wins, then
/// the larger crowding distance, then the lower index.
fn tournament(rng: &mut impl Rng, ranks: &[usize], crowding: &[f64]) -> usize {
    let a = rng.random_range(0..ranks.len());
    let b = rng.random_range(0..ranks.len());
    if ranks[a] != ranks[b] {
        return if ranks[a] < ranks[b] { a } else { b };
    }
    if crowding[a] != crowding[b] {
        return if crowding[a] > crowding[b] { a } else { b };
    }
    a.min(b)
}

/// Deterministic pick from a rank-1 archive: the member minimizing the sum
/// of min-max normalized objectives. Near-ties (relative 1e-12) resolve by
/// lower first objective (classification error under the harness
/// convention), then by insertion order.
pub fn select_final(archive: &ParetoArchive) -> &ParetoMember {
    let members = archive.members();
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for m in members {
        for k in 0..2 {
            lo[k] = lo[k].min(m.candidate.objectives[k]);
            hi[k] = hi[k].max(m.candidate.objectives[k]);
        }
    }
    let score = |m: &ParetoMember| -> f64 {
        (0..2)
            .map(|k| {
                let range = hi[k] - lo[k];
                if range > 0.0 {
                    (m.candidate.objectives[k] - lo[k]) / range
                } else {
                    0.0
                }
            })
            .sum()
    };
    let scores: Vec<f64> = members.iter().map(score).collect();
    let min_score = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * min_score.abs().max(1.0);
    let mut chosen = 0;
    let mut found = false;
    for (i, (m, &s)) in members.iter().zip(&scores).enumerate() {
        if s > min_score + tol {
            continue;
        }
        if !found {
            chosen = i;
            found = true;
            continue;
        }
        if m.candidate.objectives[0] < members[chosen].candidate.objectives[0] {
            chosen = i;
        }
    }
    &members[chosen]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(objectives: [f64; 2]) -> ParetoMember {
        ParetoMember {
            candidate: MultiCandidate {
                position: vec![1.0, 2.0],
                chromosome: TimestampChromosome::new(vec![1, 2], 4).unwrap(),
                objectives,
            },
            rank: 1,
            crowding: 0.0,
        }
    }

    #[test]
    fn sort_three_point_example() {
        let fronts = nondominated_sort(&[[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]]).unwrap();
        assert_eq!(fronts, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn sort_identical_points_single_front() {
        let fronts = nondominated_sort(&[[1.0, 1.0]; 4]).unwrap();
        assert_eq!(fronts, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn sort_chain_gives_singleton_fronts() {
        let fronts = nondominated_sort(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
        assert_eq!(fronts, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn sort_rejects_empty() {
        assert!(nondominated_sort(&[]).is_err());
    }

    /// Peeling oracle: repeatedly remove the set of candidates dominated by
    /// no remaining candidate.
    fn oracle_fronts(objectives: &[[f64; 2]]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..objectives.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| j != i && dominates(&objectives[j], &objectives[i]))
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn sort_agrees_with_peeling_oracle() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let size = rng.random_range(1..=50);
            let objectives: Vec<[f64; 2]> = (0..size)
                .map(|_| {
                    // Coarse grid so ties and duplicates occur often.
                    [
                        rng.random_range(0..8) as f64,
                        rng.random_range(0..8) as f64,
                    ]
                })
                .collect();
            assert_eq!(
                nondominated_sort(&objectives).unwrap(),
                oracle_fronts(&objectives)
            );
        }
    }

    #[test]
    fn crowding_pair_is_infinite() {
        let d = crowding_distance(&[[0.0, 1.0], [1.0, 0.0]], &[0, 1]);
        assert!(d[0].is_infinite() && d[1].is_infinite());
    }

    #[test]
    fn crowding_interior_example() {
        let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]], &[0, 1, 2]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_eq!(d[1], 2.0);
    }

    #[test]
    fn crowding_identical_values_zero_interior() {
        let d = crowding_distance(&[[1.0, 1.0]; 4], &[0, 1, 2, 3]);
        assert!(d[0].is_infinite());
        assert!(d[3].is_infinite());
        assert_eq!(d[1], 0.0);
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn archive_rejects_dominated_member() {
        let good = ParetoArchive::new(vec![member([0.0, 1.0]), member([1.0, 0.0])]);
        assert!(good.is_ok());
        let bad = ParetoArchive::new(vec![member([0.0, 0.0]), member([1.0, 1.0])]);
        assert!(bad.is_err());
        assert!(ParetoArchive::new(vec![]).is_err());
    }

    #[test]
    fn select_final_singleton() {
        let archive = ParetoArchive::new(vec![member([0.3, 0.4])]).unwrap();
        assert_eq!(select_final(&archive).candidate.objectives, [0.3, 0.4]);
    }

    #[test]
    fn select_final_symmetric_tie_takes_lower_error() {
        let archive =
            ParetoArchive::new(vec![member([0.0, 1.0]), member([1.0, 0.0])]).unwrap();
        assert_eq!(select_final(&archive).candidate.objectives, [0.0, 1.0]);
    }

    #[test]
    fn select_final_three_way_near_tie() {
        let archive = ParetoArchive::new(vec![
            member([0.2, 0.8]),
            member([0.5, 0.5]),
            member([0.8, 0.2]),
        ])
        .unwrap();
        assert_eq!(select_final(&archive).candidate.objectives, [0.2, 0.8]);
    }

    #[test]
    fn degenerate_duplicate_objective_collapses_to_scalar_optimum() {
        // Feeding the same scalar as both objectives makes dominance a total
        // order, so the archive must hold exactly the scalar minimum.
        let scalar = |c: &TimestampChromosome| {
            let s: usize = c.indices().iter().sum();
            let v = (s as f64 - 20.0).abs();
            [v, v]
        };
        let cfg = OptimizerConfig::defaults(4, 5);
        let res = nsga2_run(scalar, &cfg, 16).unwrap();
        let best = res.archive.members()[0].candidate.objectives[0];
        for m in res.archive.members() {
            assert_eq!(m.candidate.objectives[0], best);
            assert_eq!(m.candidate.objectives[1], best);
        }
        assert_eq!(res.selected.objectives[0], best);
    }

    #[test]
    fn rank1_non_domination_holds_across_seeds() {
        let f2 = |c: &TimestampChromosome| {
            let first = c.indices()[0] as f64;
            let last = *c.indices().last().unwrap() as f64;
            [first, (c.n() as f64) - last]
        };
        for seed in 0..100 {
            let cfg = OptimizerConfig {
                n_gen: 10,
                ..OptimizerConfig::defaults(3, seed)
            };
            let res = nsga2_run(f2, &cfg, 24).unwrap();
            let members = res.archive.members();
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    assert!(
                        !dominates(&a.candidate.objectives, &b.candidate.objectives)
                            && !dominates(&b.candidate.objectives, &a.candidate.objectives)
                    );
                }
            }
        }
    }

    #[test]
    fn reproducible_per_seed() {
        let f2 = |c: &TimestampChromosome| {
            let s: usize = c.indices().iter().sum();
            [(s as f64 - 30.0).abs(), c.indices()[0] as f64]
        };
        let cfg = OptimizerConfig::defaults(4, 17);
        let a = nsga2_run(f2, &cfg, 20).unwrap();
        let b = nsga2_run(f2, &cfg, 20).unwrap();
        assert_eq!(a.selected.chromosome, b.selected.chromosome);
        assert_eq!(a.history, b.history);
        assert_eq!(a.archive.len(), b.archive.len());
    }
}
