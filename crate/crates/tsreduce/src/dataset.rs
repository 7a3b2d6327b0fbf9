//! Time-series containers and UCR-format ingestion.
//!
//! A [`TimeSeries`] is an ordered sequence of finite observations with an
//! optional integer class label. A [`LabeledDataset`] is a non-empty,
//! uniform-length collection of labeled series; a [`DatasetPair`] couples a
//! train and a test dataset of equal length.
//!
//! The text format is the UCR archive layout: one series per line, label
//! first, fields separated by commas or whitespace. Canonical serialization
//! uses comma delimiters and prints values with 17 significant digits so a
//! parse/serialize round trip is bit-exact.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// An ordered sequence of real observations with an optional class label.
///
/// Invariants: length at least 2, every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Option<i64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, label: Option<i64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::contract(format!(
                "time series must have at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!(
                "time series value at position {pos} is not finite"
            )));
        }
        Ok(TimeSeries { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<i64> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy of this series with the same label and new values.
    /// Values must satisfy the usual invariants.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        TimeSeries::new(values, self.label)
    }
}

/// Subtracts the mean and divides by the population (divide-by-N) standard
/// deviation. A zero-variance series maps to all zeros rather than erroring;
/// this is the degenerate convention used throughout the SAX pipeline.
pub fn znormalize(s: &TimeSeries) -> TimeSeries {
    let n = s.values.len() as f64;
    let mean = s.values.iter().sum::<f64>() / n;
    let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let values = if std == 0.0 {
        vec![0.0; s.values.len()]
    } else {
        s.values.iter().map(|v| (v - mean) / std).collect()
    };
    TimeSeries {
        values,
        label: s.label,
    }
}

/// Uniform-length collection of labeled series; the unit on which timestamps
/// are selected.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    series: Vec<TimeSeries>,
    n: usize,
}

impl LabeledDataset {
    /// Requires a non-empty collection of equal-length, labeled series.
    pub fn new(name: impl Into<String>, series: Vec<TimeSeries>) -> Result<Self> {
        let name = name.into();
        let first = series
            .first()
            .ok_or_else(|| Error::EmptyInput { name: name.clone() })?;
        let n = first.len();
        for (i, s) in series.iter().enumerate() {
            if s.len() != n {
                return Err(Error::contract(format!(
                    "{name}: series {i} has length {}, expected {n}",
                    s.len()
                )));
            }
            if s.label().is_none() {
                return Err(Error::contract(format!(
                    "{name}: series {i} carries no label"
                )));
            }
        }
        Ok(LabeledDataset { name, series, n })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    /// Shared series length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Labels in series order. Construction guarantees every series has one.
    pub fn labels(&self) -> Vec<i64> {
        self.series.iter().map(|s| s.label().unwrap()).collect()
    }

    /// Distinct labels present.
    pub fn classes(&self) -> BTreeSet<i64> {
        self.series.iter().filter_map(|s| s.label()).collect()
    }

    /// Applies a pure per-series transform, keeping name and labels.
    pub fn map_series(&self, f: impl Fn(&TimeSeries) -> TimeSeries) -> Result<Self> {
        LabeledDataset::new(self.name.clone(), self.series.iter().map(f).collect())
    }
}

/// A train/test dataset pair sharing one series length.
#[derive(Debug, Clone)]
pub struct DatasetPair {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

impl DatasetPair {
    pub fn new(train: LabeledDataset, test: LabeledDataset) -> Result<Self> {
        if train.n() != test.n() {
            return Err(Error::contract(format!(
                "train length {} != test length {}",
                train.n(),
                test.n()
            )));
        }
        Ok(DatasetPair { train, test })
    }

    /// Shared series length.
    pub fn n(&self) -> usize {
        self.train.n()
    }

    /// Warning text when test labels are not a subset of train labels.
    /// This is a data-quality signal, never a failure.
    pub fn label_coverage_warning(&self) -> Option<String> {
        let train_classes = self.train.classes();
        let missing: Vec<i64> = self
            .test
            .classes()
            .into_iter()
            .filter(|c| !train_classes.contains(c))
            .collect();
        if missing.is_empty() {
            None
        } else {
            Some(format!(
                "{}: test labels {missing:?} never appear in train",
                self.test.name()
            ))
        }
    }
}

/// Parses one label field. Integer text (or numeric text with an integral
/// value) is used directly; anything else is treated as opaque and assigned
/// a dense negative id by first appearance, so class identity survives
/// without a separate mapping.
fn parse_label(field: &str, seen: &mut Vec<String>) -> i64 {
    if let Ok(v) = field.parse::<i64>() {
        return v;
    }
    if let Ok(v) = field.parse::<f64>() {
        if v.is_finite() && v.fract() == 0.0 && v.abs() < 2f64.powi(53) {
            return v as i64;
        }
    }
    let id = match seen.iter().position(|s| s == field) {
        Some(i) => i,
        None => {
            seen.push(field.to_string());
            seen.len() - 1
        }
    };
    -1 - id as i64
}

/// Parses UCR-format text: one series per line, label first, fields
/// separated by commas or whitespace. Line order is preserved.
pub fn parse_ucr(text: &str, name: &str) -> Result<LabeledDataset> {
    let mut series = Vec::new();
    let mut expected_fields: Option<usize> = None;
    let mut hashed_labels: Vec<String> = Vec::new();

    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = if trimmed.contains(',') {
            trimmed
                .split(',')
                .map(str::trim)
                .filter(|f| !f.is_empty())
                .collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        if let Some(expected) = expected_fields {
            if fields.len() != expected {
                return Err(Error::RaggedRow {
                    name: name.to_string(),
                    line: line_no,
                    expected,
                    found: fields.len(),
                });
            }
        } else {
            expected_fields = Some(fields.len());
        }

        let label = parse_label(fields[0], &mut hashed_labels);

        let mut values = Vec::with_capacity(fields.len() - 1);
        for (col, field) in fields.iter().enumerate().skip(1) {
            let v: f64 = field.parse().map_err(|_| Error::BadField {
                name: name.to_string(),
                line: line_no,
                column: col + 1,
                text: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::BadField {
                    name: name.to_string(),
                    line: line_no,
                    column: col + 1,
                    text: field.to_string(),
                });
            }
            values.push(v);
        }
        series.push(TimeSeries::new(values, Some(label)).map_err(|e| {
            Error::contract(format!("{name}: line {line_no}: {e}"))
        })?);
    }

    LabeledDataset::new(name, series)
}

/// Canonical serialization: comma delimiters, label first, 17 significant
/// digits so every f64 round-trips bit-for-bit.
pub fn serialize_ucr(ds: &LabeledDataset) -> String {
    let mut out = String::new();
    for s in ds.series() {
        out.push_str(&s.label().unwrap().to_string());
        for v in s.values() {
            out.push(',');
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    out
}
