//! Command-line front end: run experiments, score result directories, and
//! lint dataset files.
//!
//! Exit codes: 0 on success, 1 on contract or format errors, 2 on I/O
//! failures. TSREDUCE_THREADS caps worker concurrency; 0 or unset picks
//! the machine default.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tsreduce::dataset::parse_ucr;
use tsreduce::error::{Error, Result};
use tsreduce::harness::emit::{parse_result, result_csv, result_json, score_csv};
use tsreduce::harness::score::{score_methods, ScoreCell};
use tsreduce::harness::{
    run_experiment, ExperimentResult, ExperimentSpec, Method, Reduction, Task, STANDARD_RATIOS,
};

#[derive(Parser)]
#[command(
    name = "tsreduce",
    version,
    about = "Dataset-level time series dimensionality reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and emit its results.
    Run(RunArgs),
    /// Aggregate a directory of JSON results into a score table.
    Score(ScoreArgs),
    /// Check that a dataset file parses, and describe it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Training split in UCR format.
    #[arg(long)]
    train: PathBuf,
    /// Test split in UCR format.
    #[arg(long)]
    test: PathBuf,
    /// Reduction method: ga, de, pso, nsga2, paa, or sax.
    #[arg(long)]
    method: Method,
    /// Evaluation task: classify, cluster, or multi.
    #[arg(long)]
    task: Task,
    /// Compression ratio; the reduced size is length/ratio, floored at 2.
    #[arg(long, conflicts_with = "nbp", required_unless_present = "nbp")]
    ratio: Option<u32>,
    /// Reduced size given directly instead of via a ratio.
    #[arg(long)]
    nbp: Option<usize>,
    /// Repeated runs; run r uses seed + r.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Z-normalize both splits before anything else.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory holding JSON result files.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Dataset file to lint.
    #[arg(long)]
    train: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Score(args) => cmd_score(args),
        Command::Validate(args) => cmd_validate(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Applies TSREDUCE_THREADS to the global worker pool.
fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TSREDUCE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::contract(format!("TSREDUCE_THREADS={raw:?} is not a number")))?;
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::contract(format!("cannot size the worker pool: {e}")))
}

/// Dataset name from the train file: the stem, minus any _TRAIN suffix.
fn dataset_name(train: &Path) -> String {
    let stem = train
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    stem.strip_suffix("_TRAIN").unwrap_or(stem).to_string()
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents).map_err(|e| Error::io(path, e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let reduction = match (args.ratio, args.nbp) {
        (Some(r), None) => {
            if !STANDARD_RATIOS.contains(&r) {
                eprintln!(
                    "warning: ratio {r} is outside the standard set {STANDARD_RATIOS:?}; \
                     no reference results exist for it"
                );
            }
            Reduction::Ratio(r)
        }
        (None, Some(b)) => Reduction::Nbp(b),
        _ => unreachable!("clap enforces exactly one of --ratio and --nbp"),
    };
    let spec = ExperimentSpec {
        dataset: dataset_name(&args.train),
        train_path: args.train,
        test_path: args.test,
        method: args.method,
        task: args.task,
        reduction,
        runs: args.runs,
        seed: args.seed,
        normalize: args.normalize,
    };
    let result = run_experiment(&spec)?;
    let contents = match args.format {
        Format::Csv => result_csv(std::slice::from_ref(&result)),
        Format::Json => result_json(&result)?,
    };
    write_output(args.out.as_deref(), &contents)
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let entries = std::fs::read_dir(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::contract(format!(
            "{}: no .json result files to score",
            args.input.display()
        )));
    }

    let mut cells = Vec::new();
    for path in &paths {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let result = parse_result(&text, path)?;
        cells.extend(result_cells(&result, path));
    }
    let methods: Vec<String> = [Method::Ga, Method::De, Method::Pso, Method::Nsga2, Method::Paa, Method::Sax]
        .iter()
        .map(|m| m.as_str().to_string())
        .filter(|m| cells.iter().any(|c| c.method == *m))
        .collect();
    let (table, warnings) = score_methods(&cells, &methods)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    write_output(Some(&args.out), &score_csv(&table))
}

/// Flattens one result into scoring cells; a multi result feeds both tasks.
fn result_cells(result: &ExperimentResult, path: &Path) -> Vec<ScoreCell> {
    let mut cells = Vec::new();
    let mut push = |task: Task, value: Option<f64>| match value {
        Some(value) => cells.push(ScoreCell {
            dataset: result.dataset.clone(),
            task,
            method: result.method.as_str().to_string(),
            value,
        }),
        None => eprintln!(
            "warning: {}: missing {task} metric; cell skipped",
            path.display()
        ),
    };
    let a = &result.aggregate;
    match result.task {
        Task::Classify => push(Task::Classify, a.classification_error_mean),
        Task::Cluster => push(Task::Cluster, a.clustering_quality_mean),
        Task::Multi => {
            push(Task::Classify, a.classification_error_mean);
            push(Task::Cluster, a.clustering_quality_mean);
        }
    }
    cells
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.train).map_err(|e| Error::io(&args.train, e))?;
    let name = dataset_name(&args.train);
    let ds = parse_ucr(&text, &name)?;
    let classes = ds.classes();
    println!(
        "{name}: {} series of length {}, {} classes {:?}",
        ds.len(),
        ds.n(),
        classes.len(),
        classes
    );
    Ok(())
}
