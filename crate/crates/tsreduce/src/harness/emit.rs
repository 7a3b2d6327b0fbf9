//! Result and score serialization: CSV summaries, JSON per-run detail.

use std::path::Path;

use crate::error::{Error, Result};

use super::score::ScoreTable;
use super::{ExperimentResult, Task};

/// CSV summary, one row per result; a multi-task result contributes two
/// rows, one per reported metric. Columns: dataset, method, task, ratio,
/// nbp, metric mean, metric std, train seconds mean. The ratio column is
/// empty when the spec gave nbp directly.
pub fn result_csv(results: &[ExperimentResult]) -> String {
    let mut out =
        String::from("dataset,method,task,ratio,nbp,metric_mean,metric_std,train_seconds_mean\n");
    for r in results {
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        let mut push = |task: &str, mean: f64, std: f64| {
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{:.6},{:.3}\n",
                r.dataset, r.method, task, ratio, r.nbp, mean, std, r.aggregate.train_seconds_mean
            ));
        };
        let a = &r.aggregate;
        match r.task {
            Task::Classify => push(
                "classify",
                a.classification_error_mean.expect("classify result carries its metric"),
                a.classification_error_std.expect("classify result carries its metric"),
            ),
            Task::Cluster => push(
                "cluster",
                a.clustering_quality_mean.expect("cluster result carries its metric"),
                a.clustering_quality_std.expect("cluster result carries its metric"),
            ),
            Task::Multi => {
                push(
                    "multi/classify",
                    a.classification_error_mean.expect("multi result carries both metrics"),
                    a.classification_error_std.expect("multi result carries both metrics"),
                );
                push(
                    "multi/cluster",
                    a.clustering_quality_mean.expect("multi result carries both metrics"),
                    a.clustering_quality_std.expect("multi result carries both metrics"),
                );
            }
        }
    }
    out
}

/// Pretty-printed JSON with full per-run detail. Wall-clock fields are
/// skipped during serialization, so the output is a pure function of the
/// spec and seed.
pub fn result_json(result: &ExperimentResult) -> Result<String> {
    let mut text = serde_json::to_string_pretty(result)
        .map_err(|e| Error::contract(format!("cannot serialize result: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Parses a JSON result file's contents.
pub fn parse_result(text: &str, path: &Path) -> Result<ExperimentResult> {
    serde_json::from_str(text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Score table as CSV: one row per dataset-task cell, one column per
/// method, and a final totals row. Cells without a value are left empty.
pub fn score_csv(table: &ScoreTable) -> String {
    let mut out = String::from("dataset,task");
    for m in &table.methods {
        out.push(',');
        out.push_str(m);
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&format!("{},{}", row.dataset, row.task));
        for p in &row.points {
            out.push(',');
            if let Some(p) = p {
                out.push_str(&p.to_string());
            }
        }
        out.push('\n');
    }
    out.push_str("TOTAL,");
    for t in &table.totals {
        out.push(',');
        out.push_str(&t.to_string());
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::super::score::score_methods;
    use super::super::{Aggregate, Method, RunRecord};
    use super::*;

    fn run(seed: u64, err: f64) -> RunRecord {
        RunRecord {
            run: 0,
            seed,
            timestamps: vec![3, 9, 17],
            train_fitness: err,
            train_cluster_fitness: None,
            classification_error: Some(err),
            clustering_quality: None,
            alpha: None,
            train_seconds: 0.25,
        }
    }

    fn result() -> ExperimentResult {
        let runs = vec![run(5, 0.125)];
        ExperimentResult {
            dataset: "toy".into(),
            method: Method::De,
            task: Task::Classify,
            ratio: Some(8),
            nbp: 3,
            runs,
            aggregate: Aggregate {
                train_fitness_mean: 0.125,
                classification_error_mean: Some(0.125),
                classification_error_std: Some(0.0),
                clustering_quality_mean: None,
                clustering_quality_std: None,
                train_seconds_mean: 0.25,
            },
        }
    }

    #[test]
    fn single_run_csv_row_has_zero_std() {
        let csv = result_csv(&[result()]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "dataset,method,task,ratio,nbp,metric_mean,metric_std,train_seconds_mean"
        );
        assert_eq!(lines.next().unwrap(), "toy,de,classify,8,3,0.125000,0.000000,0.250");
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn multi_results_emit_two_rows() {
        let mut r = result();
        r.task = Task::Multi;
        r.aggregate.clustering_quality_mean = Some(0.875);
        r.aggregate.clustering_quality_std = Some(0.0);
        let csv = result_csv(&[r]);
        assert!(csv.contains("toy,de,multi/classify,8,3,0.125000"));
        assert!(csv.contains("toy,de,multi/cluster,8,3,0.875000"));
    }

    #[test]
    fn json_round_trip_preserves_timestamps() {
        let r = result();
        let text = result_json(&r).unwrap();
        let back = parse_result(&text, Path::new("mem")).unwrap();
        assert_eq!(back.runs[0].timestamps, vec![3, 9, 17]);
        assert_eq!(back, ExperimentResult {
            // Wall-clock fields are not serialized.
            runs: vec![RunRecord { train_seconds: 0.0, ..r.runs[0].clone() }],
            aggregate: Aggregate { train_seconds_mean: 0.0, ..r.aggregate.clone() },
            ..r
        });
    }

    #[test]
    fn json_output_is_reproducible() {
        let a = result_json(&result()).unwrap();
        let b = result_json(&result()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn score_table_csv_shape() {
        use super::super::score::ScoreCell;
        let cells = vec![
            ScoreCell { dataset: "d1".into(), task: Task::Classify, method: "ga".into(), value: 0.1 },
            ScoreCell { dataset: "d1".into(), task: Task::Classify, method: "paa".into(), value: 0.3 },
            ScoreCell { dataset: "d1".into(), task: Task::Cluster, method: "ga".into(), value: 0.9 },
            ScoreCell { dataset: "d1".into(), task: Task::Cluster, method: "paa".into(), value: 0.7 },
        ];
        let ms = vec!["ga".to_string(), "paa".to_string()];
        let (table, _) = score_methods(&cells, &ms).unwrap();
        let csv = score_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "dataset,task,ga,paa");
        assert_eq!(lines[1], "d1,classify,2,1");
        assert_eq!(lines[2], "d1,cluster,2,1");
        assert_eq!(lines[3], "TOTAL,,4,2");
        assert_eq!(lines.len(), 4);
    }
}
