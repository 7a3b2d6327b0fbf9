//! End-to-end runs of the installed binary: output formats, the score
//! pipeline, exit codes, and thread-count independence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tsreduce::dataset::serialize_ucr;
use tsreduce::harness::ExperimentResult;
use tsreduce::synth::{planted_signal_pair, PlantedSignalConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tsreduce"))
}

fn write_pair(dir: &Path) -> (PathBuf, PathBuf) {
    let cfg = PlantedSignalConfig {
        n: 16,
        train_per_class: 6,
        test_per_class: 6,
        planted: vec![5, 11],
        ..PlantedSignalConfig::default()
    };
    let pair = planted_signal_pair(&cfg);
    let train = dir.join("planted_TRAIN");
    let test = dir.join("planted_TEST");
    std::fs::write(&train, serialize_ucr(&pair.train)).unwrap();
    std::fs::write(&test, serialize_ucr(&pair.test)).unwrap();
    (train, test)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn run_emits_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let out = bin()
        .args(["run", "--method", "de", "--task", "classify", "--nbp", "2"])
        .args(["--runs", "2", "--seed", "1", "--format", "csv"])
        .arg("--train").arg(&train)
        .arg("--test").arg(&test)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,method,task,ratio,nbp,metric_mean,metric_std,train_seconds_mean"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("planted,de,classify,,2,"), "row: {row}");
}

#[test]
fn run_writes_parseable_json() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let out_path = dir.path().join("result.json");
    let out = bin()
        .args(["run", "--method", "ga", "--task", "cluster", "--ratio", "8"])
        .args(["--runs", "2", "--seed", "1"])
        .arg("--train").arg(&train)
        .arg("--test").arg(&test)
        .arg("--out").arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let result: ExperimentResult = serde_json::from_str(&text).unwrap();
    assert_eq!(result.dataset, "planted");
    assert_eq!(result.ratio, Some(8));
    assert_eq!(result.nbp, 2);
    assert_eq!(result.runs.len(), 2);
    assert!(result.aggregate.clustering_quality_mean.is_some());
}

#[test]
fn score_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let results = dir.path().join("results");
    std::fs::create_dir(&results).unwrap();
    for method in ["de", "paa", "sax"] {
        let out = bin()
            .args(["run", "--method", method, "--task", "classify", "--nbp", "2"])
            .args(["--runs", "1", "--seed", "0"])
            .arg("--train").arg(&train)
            .arg("--test").arg(&test)
            .arg("--out").arg(results.join(format!("{method}.json")))
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    let score_path = dir.path().join("score.csv");
    let out = bin()
        .arg("score")
        .arg("--in").arg(&results)
        .arg("--out").arg(&score_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&score_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dataset,task,de,paa,sax");
    assert!(lines.last().unwrap().starts_with("TOTAL,,"));
}

#[test]
fn validate_reports_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = write_pair(dir.path());
    let out = bin().arg("validate").arg("--train").arg(&train).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("12 series of length 16, 2 classes"),
        "got: {text}"
    );
}

#[test]
fn missing_input_exits_2() {
    let out = bin()
        .arg("validate")
        .args(["--train", "/nonexistent/file_TRAIN"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn mismatched_method_task_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let out = bin()
        .args(["run", "--method", "ga", "--task", "multi", "--nbp", "2"])
        .arg("--train").arg(&train)
        .arg("--test").arg(&test)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nsga2 and multi require each other"));
}

#[test]
fn nonstandard_ratio_warns() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let out = bin()
        .args(["run", "--method", "paa", "--task", "classify", "--ratio", "5"])
        .args(["--runs", "1"])
        .arg("--train").arg(&train)
        .arg("--test").arg(&test)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stderr(&out).contains("no reference results exist"), "stderr: {}", stderr(&out));
}

#[test]
fn bad_thread_env_exits_1() {
    let out = bin()
        .env("TSREDUCE_THREADS", "many")
        .args(["validate", "--train", "/nonexistent"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("TSREDUCE_THREADS"));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_pair(dir.path());
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .env("TSREDUCE_THREADS", threads)
            .args(["run", "--method", "nsga2", "--task", "multi", "--nbp", "3"])
            .args(["--runs", "2", "--seed", "9"])
            .arg("--train").arg(&train)
            .arg("--test").arg(&test)
            .arg("--out").arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let single = run("1", "single.json");
    let auto = run("0", "auto.json");
    assert!(!single.is_empty());
    assert_eq!(single, auto, "results depend on worker count");
}
