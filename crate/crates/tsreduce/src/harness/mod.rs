//! Experiment driver: train-stage optimization, test-stage validation,
//! baselines, multi-run averaging, scoring, and result emission.
//!
//! An experiment runs one method on one dataset pair. The training stage
//! sees only the train split: optimizer methods minimize a train-side
//! objective (LOOCV 1NN error for classification, one minus clustering
//! quality for clustering), PAA and SAX compute their representations
//! directly. The testing stage projects the test split onto the selected
//! timestamps (or reduced representation) and reports hold-out metrics.
//! Each run r of an experiment uses seed base + r; aggregates are the
//! arithmetic mean and population standard deviation over runs.
//!
//! Wall-clock training time is recorded per run but excluded from
//! serialization, so emitted JSON for a given spec is byte-identical
//! across invocations.

pub mod emit;
pub mod score;

use std::cell::Cell;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{parse_ucr, znormalize, DatasetPair, LabeledDataset, TimeSeries};
use crate::distance::{euclidean, paa_distance, reduced_distance, MindistTable};
use crate::error::{Error, Result};
use crate::mining::{holdout_error, holdout_error_items, kmeans, loocv_error_items, purity};
use crate::optimize::{de_run, ga_run, nsga2_run, pso_run, OptimizerConfig};
use crate::representation::{gaussian_breakpoints, paa, project, sax, SaxWord, TimestampChromosome};

/// Compression ratios with published reference results.
pub const STANDARD_RATIOS: [u32; 4] = [4, 8, 12, 16];

/// Alphabet sizes swept by the SAX baseline.
pub const SAX_ALPHABET_RANGE: std::ops::RangeInclusive<usize> = 3..=10;

/// Reduction method under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ga,
    De,
    Pso,
    Nsga2,
    Paa,
    Sax,
}

impl Method {
    /// True for the stochastic optimizers, false for the baselines.
    pub fn is_optimizer(self) -> bool {
        !matches!(self, Method::Paa | Method::Sax)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ga => "ga",
            Method::De => "de",
            Method::Pso => "pso",
            Method::Nsga2 => "nsga2",
            Method::Paa => "paa",
            Method::Sax => "sax",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(Method::Ga),
            "de" => Ok(Method::De),
            "pso" => Ok(Method::Pso),
            "nsga2" => Ok(Method::Nsga2),
            "paa" => Ok(Method::Paa),
            "sax" => Ok(Method::Sax),
            other => Err(Error::contract(format!(
                "unknown method {other:?} (expected ga, de, pso, nsga2, paa, or sax)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Data mining task an experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Cluster,
    Multi,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Cluster => "cluster",
            Task::Multi => "multi",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(Task::Classify),
            "cluster" => Ok(Task::Cluster),
            "multi" => Ok(Task::Multi),
            other => Err(Error::contract(format!(
                "unknown task {other:?} (expected classify, cluster, or multi)"
            ))),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Target dimensionality, given as a compression ratio or directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Ratio(u32),
    Nbp(usize),
}

impl Reduction {
    /// Resolved number of kept dimensions for series length `n`.
    pub fn nbp(self, n: usize) -> Result<usize> {
        match self {
            Reduction::Ratio(r) => nbp_from_ratio(n, r),
            Reduction::Nbp(b) => {
                if b < 2 || b > n {
                    return Err(Error::contract(format!("nbp {b} outside [2, {n}]")));
                }
                Ok(b)
            }
        }
    }

    pub fn ratio(self) -> Option<u32> {
        match self {
            Reduction::Ratio(r) => Some(r),
            Reduction::Nbp(_) => None,
        }
    }
}

/// Reduced dimensionality for a 1:ratio compression of an n-point series:
/// n/ratio rounded to nearest, floored at 2 because a single timestamp
/// admits no meaningful distance.
pub fn nbp_from_ratio(n: usize, ratio: u32) -> Result<usize> {
    if ratio < 1 {
        return Err(Error::contract("compression ratio must be at least 1"));
    }
    Ok(((n as f64 / ratio as f64).round() as usize).max(2))
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: String,
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub method: Method,
    pub task: Task,
    pub reduction: Reduction,
    /// Number of repeated runs; run r uses seed `seed + r`.
    pub runs: usize,
    pub seed: u64,
    /// Z-normalize every series of both splits before anything else.
    pub normalize: bool,
}

impl ExperimentSpec {
    /// Structural checks independent of the data files. The multi task and
    /// the multi-objective optimizer require each other; the baselines have
    /// no notion of a second objective.
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::contract("runs must be at least 1"));
        }
        if (self.task == Task::Multi) != (self.method == Method::Nsga2) {
            return Err(Error::contract(format!(
                "task {} cannot be paired with method {}: nsga2 and multi require each other",
                self.task, self.method
            )));
        }
        if let Reduction::Ratio(0) = self.reduction {
            return Err(Error::contract("compression ratio must be at least 1"));
        }
        Ok(())
    }
}

/// One run's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Selected timestamps, 1-based ascending; empty for PAA and SAX.
    pub timestamps: Vec<usize>,
    /// Minimized train-stage objective: LOOCV error, or 1 - quality. For
    /// the multi task, the classification objective.
    pub train_fitness: f64,
    /// Second train-stage objective (1 - quality); multi task only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_cluster_fitness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clustering_quality: Option<f64>,
    /// Chosen alphabet size; SAX only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    /// Wall-clock training time; never serialized.
    #[serde(skip)]
    pub train_seconds: f64,
}

/// Mean and population standard deviation over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub train_fitness_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification_error_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification_error_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clustering_quality_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clustering_quality_std: Option<f64>,
    /// Wall-clock mean; never serialized.
    #[serde(skip)]
    pub train_seconds_mean: f64,
}

/// All runs of one experiment plus their aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub dataset: String,
    pub method: Method,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<u32>,
    pub nbp: usize,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_deviation(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn aggregate_runs(runs: &[RunRecord]) -> Aggregate {
    let collect = |f: fn(&RunRecord) -> Option<f64>| -> Option<Vec<f64>> {
        runs.iter().map(f).collect()
    };
    let ce = collect(|r| r.classification_error);
    let cq = collect(|r| r.clustering_quality);
    Aggregate {
        train_fitness_mean: mean(&runs.iter().map(|r| r.train_fitness).collect::<Vec<_>>()),
        classification_error_mean: ce.as_deref().map(mean),
        classification_error_std: ce.as_deref().map(std_deviation),
        clustering_quality_mean: cq.as_deref().map(mean),
        clustering_quality_std: cq.as_deref().map(std_deviation),
        train_seconds_mean: mean(&runs.iter().map(|r| r.train_seconds).collect::<Vec<_>>()),
    }
}

/// Parses the spec's train and test files into a dataset pair,
/// z-normalizing both splits when asked.
pub fn load_pair(spec: &ExperimentSpec) -> Result<DatasetPair> {
    let read = |path: &PathBuf| -> Result<String> {
        std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))
    };
    let train = parse_ucr(&read(&spec.train_path)?, &format!("{}_TRAIN", spec.dataset))?;
    let test = parse_ucr(&read(&spec.test_path)?, &format!("{}_TEST", spec.dataset))?;
    let pair = DatasetPair::new(train, test)?;
    if !spec.normalize {
        return Ok(pair);
    }
    DatasetPair::new(
        pair.train.map_series(znormalize)?,
        pair.test.map_series(znormalize)?,
    )
}

/// Loads the spec's data files and runs the experiment.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    run_experiment_on(spec, &load_pair(spec)?)
}

/// Runs the experiment on an already-loaded dataset pair; the spec's file
/// paths are not consulted.
pub fn run_experiment_on(spec: &ExperimentSpec, pair: &DatasetPair) -> Result<ExperimentResult> {
    spec.validate()?;
    let nbp = spec.reduction.nbp(pair.n())?;
    let mut runs = Vec::with_capacity(spec.runs);
    for r in 0..spec.runs {
        let seed = spec.seed.wrapping_add(r as u64);
        let start = Instant::now();
        let mut record = match spec.method {
            Method::Paa => run_paa(spec.task, pair, nbp, seed)?,
            Method::Sax => run_sax_baseline(spec.task, pair, nbp, seed)?,
            _ => run_optimizer(spec.method, spec.task, pair, nbp, seed)?,
        };
        record.run = r;
        record.seed = seed;
        record.train_seconds = start.elapsed().as_secs_f64();
        runs.push(record);
    }
    let aggregate = aggregate_runs(&runs);
    Ok(ExperimentResult {
        dataset: spec.dataset.clone(),
        method: spec.method,
        task: spec.task,
        ratio: spec.reduction.ratio(),
        nbp,
        runs,
        aggregate,
    })
}

/// Train-stage objective for classification: LOOCV 1NN error over the
/// reduced distance.
fn classify_fitness(train: &LabeledDataset) -> impl Fn(&TimestampChromosome) -> f64 + Sync + '_ {
    let labels = train.labels();
    move |c: &TimestampChromosome| {
        let d = |a: &TimeSeries, b: &TimeSeries| {
            reduced_distance(a, b, c).expect("validated chromosome over a uniform dataset")
        };
        loocv_error_items(train.series(), &labels, d).expect("nonempty train split")
    }
}

/// Train-stage objective for clustering: 1 - purity of seeded k-means over
/// the projected series, minimized.
fn cluster_fitness(
    train: &LabeledDataset,
    k: usize,
    seed: u64,
) -> impl Fn(&TimestampChromosome) -> f64 + Sync + '_ {
    let labels = train.labels();
    move |c: &TimestampChromosome| {
        let points = projected_points(train, c);
        let result = kmeans(&points, k, seed).expect("k at most the train split size");
        1.0 - purity(&result.assignments, &labels).expect("assignments match labels")
    }
}

fn projected_points(ds: &LabeledDataset, c: &TimestampChromosome) -> Vec<Vec<f64>> {
    ds.series()
        .iter()
        .map(|s| {
            project(s, c)
                .expect("validated chromosome over a uniform dataset")
                .values()
                .to_vec()
        })
        .collect()
}

/// Hold-out 1NN error over the reduced distance, spot-checking the lower
/// bound against the full Euclidean distance on a 1% sample of calls.
fn classify_test_error(pair: &DatasetPair, c: &TimestampChromosome) -> Result<f64> {
    let calls = Cell::new(0usize);
    let d = |a: &TimeSeries, b: &TimeSeries| {
        let reduced = reduced_distance(a, b, c).expect("validated chromosome over a uniform dataset");
        if calls.get() % 100 == 0 {
            let full = euclidean(a.values(), b.values()).expect("uniform series lengths");
            assert!(
                reduced <= full * (1.0 + 1e-9),
                "lower bound violated: reduced {reduced} > euclidean {full}"
            );
        }
        calls.set(calls.get() + 1);
        reduced
    };
    holdout_error(pair, d)
}

/// Purity of seeded k-means on the projected test split.
fn cluster_test_quality(test: &LabeledDataset, c: &TimestampChromosome, seed: u64) -> Result<f64> {
    let points = projected_points(test, c);
    let result = kmeans(&points, test.classes().len(), seed)?;
    purity(&result.assignments, &test.labels())
}

fn run_optimizer(
    method: Method,
    task: Task,
    pair: &DatasetPair,
    nbp: usize,
    seed: u64,
) -> Result<RunRecord> {
    let n = pair.n();
    let cfg = OptimizerConfig::defaults(nbp, seed);
    let record = |timestamps: Vec<usize>, train_fitness: f64| RunRecord {
        run: 0,
        seed,
        timestamps,
        train_fitness,
        train_cluster_fitness: None,
        classification_error: None,
        clustering_quality: None,
        alpha: None,
        train_seconds: 0.0,
    };
    match task {
        Task::Classify => {
            let fitness = classify_fitness(&pair.train);
            let result = match method {
                Method::Ga => ga_run(&fitness, &cfg, n)?,
                Method::De => de_run(&fitness, &cfg, n)?,
                Method::Pso => pso_run(&fitness, &cfg, n)?,
                _ => unreachable!("validated method-task pairing"),
            };
            assert_improved(&result.history);
            let c = result.best.chromosome;
            let mut rec = record(c.indices().to_vec(), result.best.fitness);
            rec.classification_error = Some(classify_test_error(pair, &c)?);
            Ok(rec)
        }
        Task::Cluster => {
            let k = pair.train.classes().len();
            let fitness = cluster_fitness(&pair.train, k, seed);
            let result = match method {
                Method::Ga => ga_run(&fitness, &cfg, n)?,
                Method::De => de_run(&fitness, &cfg, n)?,
                Method::Pso => pso_run(&fitness, &cfg, n)?,
                _ => unreachable!("validated method-task pairing"),
            };
            assert_improved(&result.history);
            let c = result.best.chromosome;
            let mut rec = record(c.indices().to_vec(), result.best.fitness);
            rec.clustering_quality = Some(cluster_test_quality(&pair.test, &c, seed)?);
            Ok(rec)
        }
        Task::Multi => {
            let k = pair.train.classes().len();
            let classify = classify_fitness(&pair.train);
            let cluster = cluster_fitness(&pair.train, k, seed);
            let fitness2 = |c: &TimestampChromosome| [classify(c), cluster(c)];
            let result = nsga2_run(fitness2, &cfg, n)?;
            let first = result.history.first().expect("history has nGen + 1 entries");
            let last = result.history.last().expect("history has nGen + 1 entries");
            assert!(
                last[0] <= first[0] && last[1] <= first[1],
                "train-stage objective minima rose over the run"
            );
            let selected = result.selected;
            let c = selected.chromosome;
            let mut rec = record(c.indices().to_vec(), selected.objectives[0]);
            rec.train_cluster_fitness = Some(selected.objectives[1]);
            rec.classification_error = Some(classify_test_error(pair, &c)?);
            rec.clustering_quality = Some(cluster_test_quality(&pair.test, &c, seed)?);
            Ok(rec)
        }
    }
}

/// Best train-stage fitness must not rise from initialization to the final
/// generation.
fn assert_improved(history: &[f64]) {
    let first = history.first().expect("history has nGen + 1 entries");
    let last = history.last().expect("history has nGen + 1 entries");
    assert!(last <= first, "train-stage best fitness rose over the run");
}

fn run_paa(task: Task, pair: &DatasetPair, nbp: usize, seed: u64) -> Result<RunRecord> {
    let n = pair.n();
    let reduce = |ds: &LabeledDataset| -> Result<Vec<Vec<f64>>> {
        ds.series().iter().map(|s| paa(s.values(), nbp)).collect()
    };
    let train_points = reduce(&pair.train)?;
    let record = |train_fitness: f64| RunRecord {
        run: 0,
        seed,
        timestamps: Vec::new(),
        train_fitness,
        train_cluster_fitness: None,
        classification_error: None,
        clustering_quality: None,
        alpha: None,
        train_seconds: 0.0,
    };
    match task {
        Task::Classify => {
            let d = |a: &Vec<f64>, b: &Vec<f64>| {
                paa_distance(a, b, n, nbp).expect("uniform segment counts")
            };
            let train_labels = pair.train.labels();
            let train_err = loocv_error_items(&train_points, &train_labels, d)?;
            let test_points = reduce(&pair.test)?;
            let test_err = holdout_error_items(
                &train_points,
                &train_labels,
                &test_points,
                &pair.test.labels(),
                d,
            )?;
            let mut rec = record(train_err);
            rec.classification_error = Some(test_err);
            Ok(rec)
        }
        Task::Cluster => {
            let k = pair.train.classes().len();
            let train_result = kmeans(&train_points, k, seed)?;
            let train_quality = purity(&train_result.assignments, &pair.train.labels())?;
            let test_points = reduce(&pair.test)?;
            let test_result = kmeans(&test_points, pair.test.classes().len(), seed)?;
            let test_quality = purity(&test_result.assignments, &pair.test.labels())?;
            let mut rec = record(1.0 - train_quality);
            rec.clustering_quality = Some(test_quality);
            Ok(rec)
        }
        Task::Multi => unreachable!("validated method-task pairing"),
    }
}

/// Midpoint value of each alphabet bin; the unbounded boundary bins extend
/// half a unit beyond their breakpoint.
fn sax_bin_centers(alpha: usize) -> Result<Vec<f64>> {
    let bp = gaussian_breakpoints(alpha)?;
    Ok((0..alpha)
        .map(|s| {
            if s == 0 {
                bp[0] - 0.5
            } else if s == alpha - 1 {
                bp[alpha - 2] + 0.5
            } else {
                (bp[s - 1] + bp[s]) / 2.0
            }
        })
        .collect())
}

fn sax_words(ds: &LabeledDataset, nbp: usize, alpha: usize) -> Result<Vec<SaxWord>> {
    ds.series().iter().map(|s| sax(s, nbp, alpha)).collect()
}

/// Maps each word to its symbols' bin-center values, giving k-means a
/// numeric input.
fn sax_center_points(words: &[SaxWord], centers: &[f64]) -> Vec<Vec<f64>> {
    words
        .iter()
        .map(|w| w.symbols().iter().map(|&s| centers[s as usize]).collect())
        .collect()
}

/// SAX baseline: sweeps alphabet sizes 3 through 10 on the train split,
/// keeps the best (ties to the smallest size), then evaluates the test
/// split at the chosen size. Classification uses MINDIST 1NN; clustering
/// runs k-means on bin-center-mapped words.
pub fn run_sax_baseline(task: Task, pair: &DatasetPair, nbp: usize, seed: u64) -> Result<RunRecord> {
    let record = |alpha: usize, train_fitness: f64| RunRecord {
        run: 0,
        seed,
        timestamps: Vec::new(),
        train_fitness,
        train_cluster_fitness: None,
        classification_error: None,
        clustering_quality: None,
        alpha: Some(alpha),
        train_seconds: 0.0,
    };
    match task {
        Task::Classify => {
            let train_labels = pair.train.labels();
            let mut best: Option<(usize, f64)> = None;
            for alpha in SAX_ALPHABET_RANGE {
                let words = sax_words(&pair.train, nbp, alpha)?;
                let table = MindistTable::new(alpha)?;
                let d = |a: &SaxWord, b: &SaxWord| {
                    table.distance(a, b).expect("words share alphabet and shape")
                };
                let err = loocv_error_items(&words, &train_labels, d)?;
                if best.is_none_or(|(_, e)| err < e) {
                    best = Some((alpha, err));
                }
            }
            let (alpha, train_err) = best.expect("nonempty alphabet sweep");
            let table = MindistTable::new(alpha)?;
            let d = |a: &SaxWord, b: &SaxWord| {
                table.distance(a, b).expect("words share alphabet and shape")
            };
            let test_err = holdout_error_items(
                &sax_words(&pair.train, nbp, alpha)?,
                &train_labels,
                &sax_words(&pair.test, nbp, alpha)?,
                &pair.test.labels(),
                d,
            )?;
            let mut rec = record(alpha, train_err);
            rec.classification_error = Some(test_err);
            Ok(rec)
        }
        Task::Cluster => {
            let k = pair.train.classes().len();
            let train_labels = pair.train.labels();
            let mut best: Option<(usize, f64)> = None;
            for alpha in SAX_ALPHABET_RANGE {
                let centers = sax_bin_centers(alpha)?;
                let points = sax_center_points(&sax_words(&pair.train, nbp, alpha)?, &centers);
                let result = kmeans(&points, k, seed)?;
                let quality = purity(&result.assignments, &train_labels)?;
                if best.is_none_or(|(_, q)| quality > q) {
                    best = Some((alpha, quality));
                }
            }
            let (alpha, train_quality) = best.expect("nonempty alphabet sweep");
            let centers = sax_bin_centers(alpha)?;
            let points = sax_center_points(&sax_words(&pair.test, nbp, alpha)?, &centers);
            let result = kmeans(&points, pair.test.classes().len(), seed)?;
            let test_quality = purity(&result.assignments, &pair.test.labels())?;
            let mut rec = record(alpha, 1.0 - train_quality);
            rec.clustering_quality = Some(test_quality);
            Ok(rec)
        }
        Task::Multi => unreachable!("validated method-task pairing"),
    }
}
