//! Synthetic datasets with known ground truth.
//!
//! [`planted_signal_pair`] builds a two-class problem whose classes differ
//! only at a few known timestamps. The planted dimensions carry an
//! alternating-sign pattern (+d, -d, ...) for class 1 and its negation for
//! class 2, arranged so segment means cancel the signal: averaging-based
//! reductions are blind to it while timestamp selection can recover it
//! exactly. The remaining dimensions carry class-independent noise with
//! occasional large outliers of continuously varying magnitude, so an
//! outlier value sits far from every other value at that timestamp and the
//! affected series gets an effectively random nearest neighbor. The
//! outlier rate ramps from near zero next to the planted timestamps up to
//! its maximum far from them, the way aligned signal regions in real
//! series vary less across instances than the uninformative stretches.
//! Selecting a noise timestamp therefore hurts in proportion to its
//! distance from the informative instants: optimizers see a smooth
//! class-blind funnel in index space with the planted timestamp at the
//! bottom, rather than a needle in a flat haystack.
//!
//! [`conflicting_objectives_pair`] builds a dataset whose best
//! classification timestamps are bad for clustering and vice versa, for
//! exercising multi-objective trade-offs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{DatasetPair, LabeledDataset, TimeSeries};

/// Parameters for the planted-signal generator.
#[derive(Debug, Clone)]
pub struct PlantedSignalConfig {
    /// Series length.
    pub n: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Planted timestamps, 1-based ascending.
    pub planted: Vec<usize>,
    /// Half the class separation at each planted timestamp.
    pub delta: f64,
    /// Gaussian jitter on planted values.
    pub signal_jitter: f64,
    /// Base noise scale on unplanted values.
    pub noise_sigma: f64,
    /// Base magnitude of the occasional noise outliers; each outlier's
    /// actual magnitude is uniform in [0.5, 1.5] times this.
    pub outlier_amplitude: f64,
    /// Outlier probability far from the planted timestamps. The actual
    /// rate at timestamp t is this times min(1, d/saturation) where d is
    /// the index distance to the nearest planted timestamp, floored at
    /// `shadow_floor` so neighbors of planted timestamps never become free
    /// substitutes.
    pub outlier_rate: f64,
    /// Index distance at which the outlier rate reaches its maximum.
    pub rate_saturation: usize,
    /// Minimum outlier rate on unplanted timestamps.
    pub shadow_floor: f64,
    pub seed: u64,
}

impl Default for PlantedSignalConfig {
    /// The desk-scale instance used by the acceptance suite: n=64, 20+20
    /// series per stage, signal planted at timestamps 18, 28, 38, 48. Each
    /// planted pair shares one quarter-length segment and alternates sign,
    /// so quarter-segment means cancel the signal exactly.
    fn default() -> Self {
        PlantedSignalConfig {
            n: 64,
            train_per_class: 20,
            test_per_class: 20,
            planted: vec![18, 28, 38, 48],
            delta: 1.0,
            signal_jitter: 0.2,
            noise_sigma: 1.0,
            outlier_amplitude: 60.0,
            outlier_rate: 0.5,
            rate_saturation: 6,
            shadow_floor: 0.12,
            seed: 8,
        }
    }
}

/// Builds the planted-signal train/test pair. Deterministic in the config.
pub fn planted_signal_pair(cfg: &PlantedSignalConfig) -> DatasetPair {
    assert!(
        cfg.planted.windows(2).all(|w| w[0] < w[1])
            && cfg.planted.first().map_or(false, |&p| p >= 1)
            && cfg.planted.last().map_or(false, |&p| p <= cfg.n),
        "planted timestamps must be ascending within [1, n]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rate_at = |t: usize| -> f64 {
        let d = cfg
            .planted
            .iter()
            .map(|&p| t.abs_diff(p))
            .min()
            .expect("planted non-empty");
        let ramp = (d as f64 / cfg.rate_saturation.max(1) as f64).min(1.0);
        (cfg.outlier_rate * ramp).max(cfg.shadow_floor)
    };
    let mut build = |name: &str, per_class: usize| {
        let mut series = Vec::with_capacity(2 * per_class);
        for class in [1i64, 2] {
            for _ in 0..per_class {
                let mut values = Vec::with_capacity(cfg.n);
                for t in 1..=cfg.n {
                    let planted_slot = cfg.planted.iter().position(|&p| p == t);
                    let v = match planted_slot {
                        Some(slot) => {
                            // Alternating-sign pattern, negated for class 2,
                            // so equal-width segment means cancel.
                            let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                            let class_sign = if class == 1 { 1.0 } else { -1.0 };
                            let z: f64 = rng.sample(StandardNormal);
                            class_sign * sign * cfg.delta + z * cfg.signal_jitter
                        }
                        None => {
                            let is_outlier = rng.random::<f64>() < rate_at(t);
                            let outlier = if is_outlier {
                                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                                let factor = rng.random_range(0.5..1.5);
                                sign * factor * cfg.outlier_amplitude
                            } else {
                                0.0
                            };
                            let z: f64 = rng.sample(StandardNormal);
                            z * cfg.noise_sigma + outlier
                        }
                    };
                    values.push(v);
                }
                series.push(TimeSeries::new(values, Some(class)).expect("generated series"));
            }
        }
        LabeledDataset::new(name, series).expect("generated dataset")
    };
    let train = build("planted_TRAIN", cfg.train_per_class);
    let test = build("planted_TEST", cfg.test_per_class);
    DatasetPair::new(train, test).expect("equal lengths by construction")
}

/// Series length of the conflicting-objectives dataset.
pub const CONFLICT_N: usize = 32;
/// Timestamps (1-based) that classify perfectly but cluster poorly.
pub const CONFLICT_CLASSIFY: [usize; 2] = [5, 6];
/// Timestamps (1-based) that cluster well but classify worse.
pub const CONFLICT_CLUSTER: [usize; 2] = [20, 21];

/// Builds a two-class pair (20 train + 20 test per class, n = 32) with
/// deliberately conflicting structure:
///
/// * Timestamps 5 and 6: each class is bimodal (class 1 at +/-3, class 2 at
///   +/-1, tight jitter). Nearest neighbors stay within class, so 1NN is
///   near-perfect, but 2-means splits by sign and purity stays near 0.5.
/// * Timestamps 20 and 21: one blob per class at +/-1 with overlapping
///   spread 1.0, so 2-means recovers the classes (high purity) while 1NN
///   suffers from the overlap.
/// * All other timestamps: shared unit noise.
pub fn conflicting_objectives_pair(seed: u64) -> DatasetPair {
    let per_class = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut build = |name: &str| {
        let mut series = Vec::with_capacity(2 * per_class);
        for class in [1i64, 2] {
            for member in 0..per_class {
                // Balanced bimodal mode for the classification pair.
                let mode = if member % 2 == 0 { 1.0 } else { -1.0 };
                let mut values = Vec::with_capacity(CONFLICT_N);
                for t in 1..=CONFLICT_N {
                    let z: f64 = rng.sample(StandardNormal);
                    let v = if CONFLICT_CLASSIFY.contains(&t) {
                        let center = if class == 1 { 3.0 } else { 1.0 };
                        mode * center + z * 0.15
                    } else if CONFLICT_CLUSTER.contains(&t) {
                        let center = if class == 1 { 1.0 } else { -1.0 };
                        center + z * 1.0
                    } else {
                        z
                    };
                    values.push(v);
                }
                series.push(TimeSeries::new(values, Some(class)).expect("generated series"));
            }
        }
        LabeledDataset::new(name, series).expect("generated dataset")
    };
    let train = build("conflict_TRAIN");
    let test = build("conflict_TEST");
    DatasetPair::new(train, test).expect("equal lengths by construction")
}
