//! Tournament scoring: 2 points for the best method in a dataset-task
//! cell, 1 for the second, 0 for the third and beyond. Tied methods share
//! the best rank's points and the following rank's points are skipped.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::Task;

/// One measured value: a method's aggregate metric for a dataset and task.
/// Classification cells carry an error (smaller is better), cluster cells a
/// quality (larger is better).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCell {
    pub dataset: String,
    pub task: Task,
    pub method: String,
    pub value: f64,
}

/// Points per dataset-task row plus per-method totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// Column order for `rows` and `totals`.
    pub methods: Vec<String>,
    pub rows: Vec<ScoreRow>,
    pub totals: Vec<u32>,
}

/// One dataset-task row of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub dataset: String,
    pub task: Task,
    /// Points aligned with the table's methods; None where the method has
    /// no value in this cell.
    pub points: Vec<Option<u32>>,
}

/// Ranks methods within each dataset-task cell and assigns points.
///
/// A method's points are max(2 - b, 0) where b counts strictly better
/// present methods: ties share points and the skipped ranks get none.
/// Rows are ordered by dataset then task. Duplicated cells keep the first
/// value; cells naming a method outside `methods`, and rows left with
/// fewer than two present methods, are dropped. Every drop is reported in
/// the returned warning list.
pub fn score_methods(cells: &[ScoreCell], methods: &[String]) -> Result<(ScoreTable, Vec<String>)> {
    if methods.len() < 2 {
        return Err(Error::contract("scoring needs at least 2 methods"));
    }
    let mut warnings = Vec::new();
    let mut grouped: BTreeMap<(String, Task), BTreeMap<usize, f64>> = BTreeMap::new();
    for cell in cells {
        if cell.task == Task::Multi {
            return Err(Error::contract(
                "multi-task cells must be split into classify and cluster before scoring",
            ));
        }
        let Some(column) = methods.iter().position(|m| *m == cell.method) else {
            warnings.push(format!(
                "{}/{}: method {:?} not in the scored set; value ignored",
                cell.dataset, cell.task, cell.method
            ));
            continue;
        };
        let row = grouped
            .entry((cell.dataset.clone(), cell.task))
            .or_default();
        if row.contains_key(&column) {
            warnings.push(format!(
                "{}/{}: duplicate value for method {:?}; keeping the first",
                cell.dataset, cell.task, cell.method
            ));
            continue;
        }
        row.insert(column, cell.value);
    }

    let mut rows = Vec::new();
    let mut totals = vec![0u32; methods.len()];
    for ((dataset, task), values) in grouped {
        for (column, _) in methods.iter().enumerate() {
            if !values.contains_key(&column) {
                warnings.push(format!(
                    "{dataset}/{task}: no value for method {:?}; cell scored over the rest",
                    methods[column]
                ));
            }
        }
        if values.len() < 2 {
            warnings.push(format!(
                "{dataset}/{task}: fewer than two methods present; row dropped"
            ));
            continue;
        }
        let better = |a: f64, b: f64| match task {
            Task::Classify => a < b,
            Task::Cluster => a > b,
            Task::Multi => unreachable!("rejected above"),
        };
        let mut points = vec![None; methods.len()];
        for (&column, &value) in &values {
            let beaten_by = values.values().filter(|&&v| better(v, value)).count() as u32;
            let p = 2u32.saturating_sub(beaten_by);
            points[column] = Some(p);
            totals[column] += p;
        }
        rows.push(ScoreRow {
            dataset,
            task,
            points,
        });
    }
    Ok((ScoreTable { methods: methods.to_vec(), rows, totals }, warnings))
}
