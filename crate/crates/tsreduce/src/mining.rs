//! Fitness tasks: 1NN classification and k-means clustering.
//!
//! Classification uses the 1-nearest-neighbor rule under a caller-supplied
//! distance, evaluated either by leave-one-out cross-validation on a single
//! dataset (the train-stage fitness) or by hold-out against a test set.
//! Clustering uses Lloyd's k-means with a seeded random initialization and
//! reports both the plain-distance objective and the squared objective, plus
//! label-grounded quality (purity by default, Rand index as an alternative).
//!
//! The classifier core is generic over the item type so the same code serves
//! raw series, projected series, PAA vectors, and SAX words.

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetPair, LabeledDataset, TimeSeries};
use crate::error::{Error, Result};

/// Index of the item minimizing `dist_to`, ties broken by lowest index.
fn nearest_index<T>(items: &[T], dist_to: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, item) in items.iter().enumerate() {
        let d = dist_to(item);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// 1NN over arbitrary labeled items. Ties broken by lowest training index.
pub fn nn1_classify_items<T>(
    items: &[T],
    labels: &[i64],
    query: &T,
    dist: impl Fn(&T, &T) -> f64,
) -> Result<i64> {
    if items.is_empty() {
        return Err(Error::contract("1NN over an empty training set"));
    }
    if items.len() != labels.len() {
        return Err(Error::contract(format!(
            "1NN: {} items but {} labels",
            items.len(),
            labels.len()
        )));
    }
    Ok(labels[nearest_index(items, |t| dist(query, t))])
}

/// Leave-one-out 1NN error over arbitrary labeled items.
pub fn loocv_error_items<T>(
    items: &[T],
    labels: &[i64],
    dist: impl Fn(&T, &T) -> f64,
) -> Result<f64> {
    if items.len() < 2 {
        return Err(Error::contract(
            "LOOCV needs at least 2 items to hold one out",
        ));
    }
    if items.len() != labels.len() {
        return Err(Error::contract(format!(
            "LOOCV: {} items but {} labels",
            items.len(),
            labels.len()
        )));
    }
    let mut errors = 0usize;
    for (q, query) in items.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (i, item) in items.iter().enumerate() {
            if i == q {
                continue;
            }
            let d = dist(query, item);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        if labels[best] != labels[q] {
            errors += 1;
        }
    }
    Ok(errors as f64 / items.len() as f64)
}

/// Label of the training series nearest to `query`.
pub fn nn1_classify(
    train: &LabeledDataset,
    query: &TimeSeries,
    dist: impl Fn(&TimeSeries, &TimeSeries) -> f64,
) -> Result<i64> {
    nn1_classify_items(train.series(), &train.labels(), query, dist)
}

/// Fraction of train series misclassified when each is held out in turn.
pub fn loocv_error(
    ds: &LabeledDataset,
    dist: impl Fn(&TimeSeries, &TimeSeries) -> f64,
) -> Result<f64> {
    loocv_error_items(ds.series(), &ds.labels(), dist)
}

/// Fraction of test series whose 1NN label against train disagrees with the
/// true label.
pub fn holdout_error(
    pair: &DatasetPair,
    dist: impl Fn(&TimeSeries, &TimeSeries) -> f64,
) -> Result<f64> {
    holdout_error_items(
        pair.train.series(),
        &pair.train.labels(),
        pair.test.series(),
        &pair.test.labels(),
        dist,
    )
}

/// Hold-out 1NN error over arbitrary labeled items.
pub fn holdout_error_items<T>(
    train: &[T],
    train_labels: &[i64],
    test: &[T],
    test_labels: &[i64],
    dist: impl Fn(&T, &T) -> f64,
) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::contract("hold-out over an empty test set"));
    }
    let mut errors = 0usize;
    for (query, truth) in test.iter().zip(test_labels) {
        if nn1_classify_items(train, train_labels, query, &dist)? != *truth {
            errors += 1;
        }
    }
    Ok(errors as f64 / test.len() as f64)
}

/// Outcome of one k-means run.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// Cluster index per point, each in `[0, k)`.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Completed assign/update rounds.
    pub iterations: usize,
    /// Sum of plain Euclidean distances from each point to its centroid.
    pub error: f64,
    /// Sum of squared Euclidean distances; the objective Lloyd minimizes.
    pub squared_error: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign_points(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| nearest_index(centroids, |c| sq_dist(p, c)))
        .collect()
}

fn objectives(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> (f64, f64) {
    let mut plain = 0.0;
    let mut squared = 0.0;
    for (p, &a) in points.iter().zip(assignments) {
        let d2 = sq_dist(p, &centroids[a]);
        plain += d2.sqrt();
        squared += d2;
    }
    (plain, squared)
}

/// Lloyd's k-means from a seeded random initialization.
///
/// Initial centroids are k distinct points chosen uniformly. Iteration stops
/// when assignments are unchanged or after 300 rounds. A cluster left empty
/// by an assignment step is reseeded with the point farthest from its
/// current centroid. The squared objective is asserted non-increasing across
/// rounds, and the plain objective across each assignment step; both are
/// reported.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<ClusteringResult> {
    use rand::SeedableRng;

    if points.is_empty() {
        return Err(Error::contract("k-means over an empty point set"));
    }
    if k < 1 || k > points.len() {
        return Err(Error::contract(format!(
            "cluster count {k} outside [1, {}]",
            points.len()
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::contract("k-means points have mixed dimensions"));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, points.len(), k);
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|i| points[i].clone()).collect();

    let mut assignments = assign_points(points, &centroids);
    repair_empty_clusters(points, &centroids, &mut assignments, k);
    update_centroids(points, &assignments, k, &mut centroids);
    let (mut plain, mut squared) = objectives(points, &centroids, &assignments);
    let mut iterations = 1usize;

    while iterations < 300 {
        let new_assignments = assign_points(points, &centroids);
        let (new_plain, _) = objectives(points, &centroids, &new_assignments);
        assert!(
            new_plain <= plain + 1e-9 * plain.max(1.0),
            "assignment step increased the plain objective: {new_plain} > {plain}"
        );
        if new_assignments == assignments {
            break;
        }
        assignments = new_assignments;
        repair_empty_clusters(points, &centroids, &mut assignments, k);
        update_centroids(points, &assignments, k, &mut centroids);
        let (p, s) = objectives(points, &centroids, &assignments);
        assert!(
            s <= squared + 1e-9 * squared.max(1.0),
            "squared objective increased across an iteration: {s} > {squared}"
        );
        plain = p;
        squared = s;
        iterations += 1;
    }

    Ok(ClusteringResult {
        assignments,
        centroids,
        iterations,
        error: plain,
        squared_error: squared,
    })
}

/// Moves the point farthest from its current centroid into each empty
/// cluster, skipping points that are the sole member of their cluster.
fn repair_empty_clusters(
    points: &[Vec<f64>],
    centroids: &[Vec<f64>],
    assignments: &mut [usize],
    k: usize,
) {
    let mut sizes = vec![0usize; k];
    for &a in assignments.iter() {
        sizes[a] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far = usize::MAX;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if sizes[assignments[i]] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[assignments[i]]);
            if d > far_d {
                far = i;
                far_d = d;
            }
        }
        // k <= point count guarantees some cluster holds 2+ points.
        debug_assert!(far != usize::MAX, "no donor point for empty cluster");
        sizes[assignments[far]] -= 1;
        assignments[far] = empty;
        sizes[empty] = 1;
    }
}

fn update_centroids(
    points: &[Vec<f64>],
    assignments: &[usize],
    k: usize,
    centroids: &mut [Vec<f64>],
) {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        for (s, v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
        counts[a] += 1;
    }
    for (c, (sum, count)) in centroids.iter_mut().zip(sums.iter().zip(&counts)) {
        debug_assert!(*count > 0, "empty cluster at centroid update");
        for (cv, sv) in c.iter_mut().zip(sum) {
            *cv = sv / *count as f64;
        }
    }
}

/// Named clustering-quality metric, selectable from experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityMetric {
    Purity,
    Rand,
}

impl QualityMetric {
    pub fn evaluate(self, assignments: &[usize], labels: &[i64]) -> Result<f64> {
        match self {
            QualityMetric::Purity => purity(assignments, labels),
            QualityMetric::Rand => rand_index(assignments, labels),
        }
    }
}

impl std::str::FromStr for QualityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "purity" => Ok(QualityMetric::Purity),
            "rand" => Ok(QualityMetric::Rand),
            other => Err(Error::contract(format!(
                "unknown quality metric {other:?} (expected \"purity\" or \"rand\")"
            ))),
        }
    }
}

/// Purity: fraction of points whose label matches the majority label of
/// their cluster.
pub fn purity(assignments: &[usize], labels: &[i64]) -> Result<f64> {
    if assignments.len() != labels.len() {
        return Err(Error::contract(format!(
            "purity: {} assignments but {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    if assignments.is_empty() {
        return Err(Error::contract("purity over an empty assignment"));
    }
    let k = assignments.iter().max().unwrap() + 1;
    let mut counts: Vec<std::collections::BTreeMap<i64, usize>> = vec![Default::default(); k];
    for (&a, &l) in assignments.iter().zip(labels) {
        *counts[a].entry(l).or_insert(0) += 1;
    }
    let majority_sum: usize = counts
        .iter()
        .map(|m| m.values().copied().max().unwrap_or(0))
        .sum();
    Ok(majority_sum as f64 / assignments.len() as f64)
}

/// Rand index: fraction of point pairs on which clustering and labels agree
/// (together in both or apart in both).
pub fn rand_index(assignments: &[usize], labels: &[i64]) -> Result<f64> {
    if assignments.len() != labels.len() {
        return Err(Error::contract(format!(
            "rand index: {} assignments but {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    let n = assignments.len();
    if n < 2 {
        return Err(Error::contract("rand index needs at least 2 points"));
    }
    let mut agree = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let same_cluster = assignments[i] == assignments[j];
            let same_label = labels[i] == labels[j];
            if same_cluster == same_label {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}

/// Test-stage metrics for one run; at least one field is present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub classification_error: Option<f64>,
    pub clustering_quality: Option<f64>,
}

impl TaskMetrics {
    pub fn new(
        classification_error: Option<f64>,
        clustering_quality: Option<f64>,
    ) -> Result<Self> {
        if classification_error.is_none() && clustering_quality.is_none() {
            return Err(Error::contract("task metrics with neither field present"));
        }
        Ok(TaskMetrics {
            classification_error,
            clustering_quality,
        })
    }
}
