//! Distance kernels and their lower-bounding relationships.
//!
//! Mining on a reduced representation gives no false dismissals as long as
//! the reduced-space distance never exceeds the original-space distance.
//! Three reduced distances are provided, each with that guarantee:
//!
//! * [`reduced_distance`] over timestamp projections is a sub-sum of the
//!   full Euclidean sum of squares, so the bound is immediate.
//! * [`paa_distance`] scales the Euclidean distance between PAA vectors by
//!   sqrt(n/N).
//! * [`mindist`] over SAX words lower-bounds the PAA distance on
//!   z-normalized series via a breakpoint lookup table.

use crate::dataset::TimeSeries;
use crate::error::{Error, Result};
use crate::representation::{gaussian_breakpoints, SaxWord, TimestampChromosome};

/// Plain Euclidean distance between equal-length sequences.
pub fn euclidean(s: &[f64], t: &[f64]) -> Result<f64> {
    if s.len() != t.len() {
        return Err(Error::contract(format!(
            "euclidean over mismatched lengths {} and {}",
            s.len(),
            t.len()
        )));
    }
    Ok(s.iter()
        .zip(t)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Euclidean distance restricted to the chromosome's timestamps.
///
/// Equals `euclidean(project(s,c), project(t,c))` without materializing the
/// projections, and never exceeds `euclidean(s,t)`.
pub fn reduced_distance(
    s: &TimeSeries,
    t: &TimeSeries,
    c: &TimestampChromosome,
) -> Result<f64> {
    if s.len() != c.n() || t.len() != c.n() {
        return Err(Error::contract(format!(
            "reduced_distance over lengths {} and {} with chromosome n {}",
            s.len(),
            t.len(),
            c.n()
        )));
    }
    let sv = s.values();
    let tv = t.values();
    Ok(c.indices()
        .iter()
        .map(|&i| {
            let d = sv[i - 1] - tv[i - 1];
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// Distance between PAA representations: sqrt(n/N) times the Euclidean
/// distance of the segment-mean vectors. Lower-bounds the Euclidean
/// distance between the original series.
pub fn paa_distance(sp: &[f64], tp: &[f64], n: usize, segments: usize) -> Result<f64> {
    if sp.len() != tp.len() {
        return Err(Error::contract(format!(
            "paa_distance over mismatched lengths {} and {}",
            sp.len(),
            tp.len()
        )));
    }
    if segments != sp.len() {
        return Err(Error::contract(format!(
            "paa_distance segment count {segments} does not match vectors of length {}",
            sp.len()
        )));
    }
    if segments < 1 || segments > n {
        return Err(Error::contract(format!(
            "paa_distance segment count {segments} outside [1, {n}]"
        )));
    }
    Ok((n as f64 / segments as f64).sqrt() * euclidean(sp, tp)?)
}

/// Symbol-pair lookup table for MINDIST.
///
/// cell(r, c) is 0 when the symbols are equal or adjacent, otherwise the gap
/// between the breakpoints separating them. Symmetric with a zero diagonal.
#[derive(Debug, Clone)]
pub struct MindistTable {
    alpha: usize,
    cells: Vec<f64>,
}

impl MindistTable {
    pub fn new(alpha: usize) -> Result<Self> {
        let breakpoints = gaussian_breakpoints(alpha)?;
        let mut cells = vec![0.0; alpha * alpha];
        for r in 0..alpha {
            for c in 0..alpha {
                if r.abs_diff(c) > 1 {
                    let hi = r.max(c);
                    let lo = r.min(c);
                    cells[r * alpha + c] = breakpoints[hi - 1] - breakpoints[lo];
                }
            }
        }
        Ok(MindistTable { alpha, cells })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn cell(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.alpha && c < self.alpha, "symbol outside alphabet");
        self.cells[r * self.alpha + c]
    }

    /// MINDIST between two SAX words using this table.
    pub fn distance(&self, a: &SaxWord, b: &SaxWord) -> Result<f64> {
        if a.alpha() != self.alpha || b.alpha() != self.alpha {
            return Err(Error::contract(format!(
                "mindist alphabet mismatch: table {}, words {} and {}",
                self.alpha,
                a.alpha(),
                b.alpha()
            )));
        }
        if a.len() != b.len() || a.n() != b.n() {
            return Err(Error::contract(format!(
                "mindist over incompatible words: N {} vs {}, n {} vs {}",
                a.len(),
                b.len(),
                a.n(),
                b.n()
            )));
        }
        let sum: f64 = a
            .symbols()
            .iter()
            .zip(b.symbols())
            .map(|(&r, &c)| {
                let d = self.cell(r as usize, c as usize);
                d * d
            })
            .sum();
        Ok((a.n() as f64 / a.len() as f64).sqrt() * sum.sqrt())
    }
}

/// MINDIST between two SAX words, building the lookup table on the fly.
/// Loops should construct one [`MindistTable`] and call
/// [`MindistTable::distance`] instead.
pub fn mindist(a: &SaxWord, b: &SaxWord) -> Result<f64> {
    if a.alpha() != b.alpha() {
        return Err(Error::contract(format!(
            "mindist alphabet mismatch: {} vs {}",
            a.alpha(),
            b.alpha()
        )));
    }
    MindistTable::new(a.alpha())?.distance(a, b)
}
