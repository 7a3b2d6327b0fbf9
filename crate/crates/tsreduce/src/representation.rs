//! Reduced representations: timestamp projection, PAA, and SAX.
//!
//! Projection keeps a fixed subset of timestamps from every series; which
//! subset is the optimization variable, encoded as a [`TimestampChromosome`].
//! PAA replaces a series by segment means; SAX z-normalizes, applies PAA,
//! then discretizes against Gaussian-equiprobable breakpoints.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::{znormalize, TimeSeries};
use crate::error::{Error, Result};

/// An ascending list of nbp timestamp positions (1-based) shared by every
/// series in a dataset.
///
/// Invariants: strictly ascending, all in `[1, n]`, and `2 <= nbp <= n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimestampChromosome {
    indices: Vec<usize>,
    n: usize,
}

impl TimestampChromosome {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.len() < 2 || indices.len() > n {
            return Err(Error::contract(format!(
                "chromosome length {} outside [2, {n}]",
                indices.len()
            )));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::contract(format!(
                    "chromosome indices not strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if indices[0] < 1 || *indices.last().unwrap() > n {
            return Err(Error::contract(format!(
                "chromosome indices must lie in [1, {n}], got {:?}",
                (indices[0], *indices.last().unwrap())
            )));
        }
        Ok(TimestampChromosome { indices, n })
    }

    /// The identity chromosome (1, 2, ..., n).
    pub fn full(n: usize) -> Result<Self> {
        TimestampChromosome::new((1..=n).collect(), n)
    }

    /// 1-based timestamp positions, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Source series length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Chromosome length nbp.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Keeps only the data points at the chromosome's timestamps.
/// The label is preserved.
pub fn project(s: &TimeSeries, c: &TimestampChromosome) -> Result<TimeSeries> {
    if s.len() != c.n() {
        return Err(Error::contract(format!(
            "series length {} does not match chromosome n {}",
            s.len(),
            c.n()
        )));
    }
    let values = c.indices().iter().map(|&i| s.values()[i - 1]).collect();
    s.with_values(values)
}

/// Piecewise Aggregate Approximation: reduces `values` to `segments` means.
///
/// When the length divides evenly each output is the arithmetic mean of a
/// contiguous block. Otherwise each raw point contributes to frames
/// proportionally to its fractional overlap, which keeps the representation
/// well defined for every length (archive lengths are rarely multiples of
/// the compression ratio).
pub fn paa(values: &[f64], segments: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if segments < 1 || segments > n {
        return Err(Error::contract(format!(
            "segment count {segments} outside [1, {n}]"
        )));
    }
    if n % segments == 0 {
        let w = n / segments;
        return Ok(values
            .chunks_exact(w)
            .map(|c| c.iter().sum::<f64>() / w as f64)
            .collect());
    }
    let width = n as f64 / segments as f64;
    let mut out = Vec::with_capacity(segments);
    for i in 0..segments {
        let start = i as f64 * width;
        let end = start + width;
        let mut sum = 0.0;
        let first = start.floor() as usize;
        let last = (end.ceil() as usize).min(n);
        for (j, &v) in values.iter().enumerate().take(last).skip(first) {
            let overlap = (end.min((j + 1) as f64) - start.max(j as f64)).max(0.0);
            sum += overlap * v;
        }
        out.push(sum / width);
    }
    Ok(out)
}

/// Thresholds splitting the standard normal into `alpha` equiprobable bins.
///
/// Produced symmetrically from the inverse CDF so that breakpoint k and
/// breakpoint alpha-k are exact negations, with an exact 0 in the middle for
/// even alphabet sizes.
pub fn gaussian_breakpoints(alpha: usize) -> Result<Vec<f64>> {
    if !(3..=10).contains(&alpha) {
        return Err(Error::contract(format!(
            "alphabet size {alpha} outside supported range [3, 10]"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal parameters");
    let mut breakpoints = vec![0.0; alpha - 1];
    for k in 1..alpha {
        breakpoints[k - 1] = match (2 * k).cmp(&alpha) {
            std::cmp::Ordering::Less => normal.inverse_cdf(k as f64 / alpha as f64),
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => -normal.inverse_cdf((alpha - k) as f64 / alpha as f64),
        };
    }
    Ok(breakpoints)
}

/// Assigns each value its bin index: symbol b iff β_b <= value < β_{b+1}
/// with β_0 = −∞ and β_alpha = +∞. Boundary values go to the upper bin.
fn discretize(values: &[f64], breakpoints: &[f64]) -> Vec<u8> {
    values
        .iter()
        .map(|&v| breakpoints.iter().filter(|&&b| b <= v).count() as u8)
        .collect()
}

/// A SAX word: `word_len` symbols over an alphabet of `alpha` bins,
/// produced from a series of original length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaxWord {
    symbols: Vec<u8>,
    alpha: usize,
    n: usize,
}

impl SaxWord {
    pub fn new(symbols: Vec<u8>, alpha: usize, n: usize) -> Result<Self> {
        if !(3..=10).contains(&alpha) {
            return Err(Error::contract(format!(
                "alphabet size {alpha} outside supported range [3, 10]"
            )));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= alpha) {
            return Err(Error::contract(format!(
                "symbol {s} outside alphabet of size {alpha}"
            )));
        }
        Ok(SaxWord { symbols, alpha, n })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Original series length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Word length N.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Letter form over 'a'..'j' (symbol 0 -> 'a') for logs and golden files.
    pub fn as_string(&self) -> String {
        self.symbols.iter().map(|&s| (b'a' + s) as char).collect()
    }
}

/// SAX: z-normalize, PAA to `word_len` segments, then discretize against
/// the Gaussian-equiprobable breakpoints for `alpha` bins.
pub fn sax(s: &TimeSeries, word_len: usize, alpha: usize) -> Result<SaxWord> {
    let breakpoints = gaussian_breakpoints(alpha)?;
    let z = znormalize(s);
    let reduced = paa(z.values(), word_len)?;
    SaxWord::new(discretize(&reduced, &breakpoints), alpha, s.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries::new(values.to_vec(), Some(1)).unwrap()
    }

    const S1: [f64; 8] = [1.0, -4.0, 11.0, 0.0, 3.0, -9.0, 4.0, 0.0];
    const S2: [f64; 8] = [-1.0, 10.0, -5.0, 4.0, -5.0, 5.0, -3.0, 1.0];
    const S3: [f64; 8] = [2.0, -1.0, 3.0, 0.0, -5.0, -4.0, -2.0, -1.0];
    const S4: [f64; 8] = [-8.0, 10.0, 17.0, -15.0, -18.0, 9.0, 4.0, -7.0];

    #[test]
    fn chromosome_enforces_invariants() {
        assert!(TimestampChromosome::new(vec![3, 7], 8).is_ok());
        assert!(TimestampChromosome::new(vec![3], 8).is_err());
        assert!(TimestampChromosome::new(vec![7, 3], 8).is_err());
        assert!(TimestampChromosome::new(vec![3, 3], 8).is_err());
        assert!(TimestampChromosome::new(vec![0, 3], 8).is_err());
        assert!(TimestampChromosome::new(vec![3, 9], 8).is_err());
        assert!(TimestampChromosome::new(vec![1, 2, 3], 2).is_err());
    }

    #[test]
    fn project_picks_listed_timestamps() {
        let c = TimestampChromosome::new(vec![3, 7], 8).unwrap();
        let p = project(&ts(&S1), &c).unwrap();
        assert_eq!(p.values(), &[11.0, 4.0]);
        assert_eq!(p.label(), Some(1));
    }

    #[test]
    fn project_with_full_chromosome_is_identity() {
        let c = TimestampChromosome::full(8).unwrap();
        let s = ts(&S2);
        assert_eq!(project(&s, &c).unwrap(), s);
    }

    #[test]
    fn project_rejects_length_mismatch() {
        let c = TimestampChromosome::new(vec![1, 2], 4).unwrap();
        assert!(project(&ts(&S1), &c).is_err());
    }

    #[test]
    fn paa_halves_worked_series() {
        assert_eq!(paa(&S1, 2).unwrap(), vec![2.0, -0.5]);
        assert_eq!(paa(&S2, 2).unwrap(), vec![2.0, -0.5]);
        assert_eq!(paa(&S3, 2).unwrap(), vec![1.0, -3.0]);
        assert_eq!(paa(&S4, 2).unwrap(), vec![1.0, -3.0]);
    }

    #[test]
    fn paa_full_resolution_is_identity() {
        assert_eq!(paa(&S1, 8).unwrap(), S1.to_vec());
    }

    #[test]
    fn paa_rejects_bad_segment_counts() {
        assert!(paa(&S1, 0).is_err());
        assert!(paa(&S1, 9).is_err());
    }

    #[test]
    fn paa_fractional_overlap_weights_points() {
        // 3 points into 2 frames of width 1.5: frame 0 covers all of point 0
        // and half of point 1, frame 1 the rest.
        let got = paa(&[3.0, 6.0, 9.0], 2).unwrap();
        let want = [
            (1.0 * 3.0 + 0.5 * 6.0) / 1.5,
            (0.5 * 6.0 + 1.0 * 9.0) / 1.5,
        ];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn breakpoints_match_inverse_cdf_oracle() {
        // Oracle: bisect the standard normal CDF, an independent route from
        // the closed-form inverse used by the implementation.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let bisect = |p: f64| {
            let (mut lo, mut hi) = (-10.0f64, 10.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if normal.cdf(mid) < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        for alpha in 3..=10 {
            let bp = gaussian_breakpoints(alpha).unwrap();
            assert_eq!(bp.len(), alpha - 1);
            for (k, &b) in bp.iter().enumerate() {
                let want = bisect((k + 1) as f64 / alpha as f64);
                assert!((b - want).abs() < 1e-6, "alpha={alpha} k={k}: {b} vs {want}");
            }
        }
    }

    #[test]
    fn breakpoints_alpha3_and_alpha4_frozen_values() {
        let b3 = gaussian_breakpoints(3).unwrap();
        assert!((b3[0] + 0.430727).abs() < 1e-6, "{b3:?}");
        assert!((b3[1] - 0.430727).abs() < 1e-6, "{b3:?}");
        let b4 = gaussian_breakpoints(4).unwrap();
        assert!((b4[0] + 0.674490).abs() < 1e-6, "{b4:?}");
        assert_eq!(b4[1], 0.0);
        assert!((b4[2] - 0.674490).abs() < 1e-6, "{b4:?}");
    }

    #[test]
    fn breakpoints_are_sorted_and_symmetric() {
        for alpha in 3..=10 {
            let bp = gaussian_breakpoints(alpha).unwrap();
            for w in bp.windows(2) {
                assert!(w[0] < w[1]);
            }
            for k in 0..bp.len() {
                assert_eq!(bp[k], -bp[bp.len() - 1 - k], "alpha={alpha}");
            }
        }
    }

    #[test]
    fn breakpoints_reject_out_of_range_alphabets() {
        assert!(gaussian_breakpoints(2).is_err());
        assert!(gaussian_breakpoints(11).is_err());
    }

    #[test]
    fn sax_constant_series_sits_on_the_zero_boundary() {
        // z-normalized constant is all zeros; with half-open bins the value 0
        // lands in the upper of the two middle bins for alpha=4.
        let w = sax(&ts(&[7.0, 7.0, 7.0, 7.0]), 2, 4).unwrap();
        assert_eq!(w.symbols(), &[2, 2]);
        assert_eq!(w.as_string(), "cc");
    }

    #[test]
    fn sax_sign_split_at_alpha3() {
        // [-3,-1,1,3] z-normalizes to +/-1.342, +/-0.447; alpha=3 breakpoints
        // are +/-0.431, so the negatives map low and the positives high.
        let w = sax(&ts(&[-3.0, -1.0, 1.0, 3.0]), 4, 3).unwrap();
        assert_eq!(w.symbols(), &[0, 0, 2, 2]);
        assert_eq!(w.as_string(), "aacc");
    }

    #[test]
    fn sax_ramp_is_non_decreasing() {
        let ramp: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let w = sax(&TimeSeries::new(ramp, None).unwrap(), 16, 10).unwrap();
        for pair in w.symbols().windows(2) {
            assert!(pair[0] <= pair[1], "{:?}", w.symbols());
        }
        assert_eq!(w.symbols()[0], 0);
        assert_eq!(w.symbols()[15], 9);
    }

    #[test]
    fn sax_word_invariant_gate() {
        assert!(SaxWord::new(vec![0, 3], 3, 8).is_err());
        assert!(SaxWord::new(vec![0, 2], 3, 8).is_ok());
        assert!(SaxWord::new(vec![0, 1], 2, 8).is_err());
    }

    proptest! {
        #[test]
        fn paa_identity_and_mean_preservation(
            values in proptest::collection::vec(-100.0f64..100.0, 8..40)
        ) {
            let n = values.len();
            prop_assert_eq!(paa(&values, n).unwrap(), values.clone());
            // Mean preservation for every divisor of n.
            let mean = values.iter().sum::<f64>() / n as f64;
            for seg in 1..=n {
                if n % seg == 0 {
                    let reduced = paa(&values, seg).unwrap();
                    let rmean = reduced.iter().sum::<f64>() / seg as f64;
                    prop_assert!((rmean - mean).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn sax_invariant_to_positive_affine_maps(
            values in proptest::collection::vec(-50.0f64..50.0, 8..32),
            a in 0.1f64..10.0,
            b in -20.0f64..20.0,
            word in 2usize..8,
            alpha in 3usize..=10,
        ) {
            let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-3);
            let s = TimeSeries::new(values.clone(), None).unwrap();
            let mapped = TimeSeries::new(
                values.iter().map(|v| a * v + b).collect(),
                None,
            ).unwrap();
            let w1 = sax(&s, word, alpha).unwrap();
            let w2 = sax(&mapped, word, alpha).unwrap();
            prop_assert_eq!(w1.symbols(), w2.symbols());
        }
    }
}
