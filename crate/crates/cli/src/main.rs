//! `imbal`: evaluate, audit and stress-test confusion-matrix indices.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use imbalance_core::audit::{self, check_conformance, AuditConfig, Condition1Config};
use imbalance_core::io::{read_labels_csv, read_matrix_csv, write_matrix_csv, LabeledMatrix};
use imbalance_core::lab::{run_experiment, write_long_csv, write_summary_csv, ExperimentSpec};
use imbalance_core::multiclass::theoretical_bounds;
use imbalance_core::{Error, IndexId, IndexValue};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

const INDEX_HELP: &str = "Index ids: gmean2, auroc, precision, recall, specificity, aurpc, m_precision, m_aurpc \
(two-class, positive class in row 0); gmean_c, acsa, auroc_ovo, auroc_ova, n_auroc_ova, aurpc_ova, m_aurpc_ova \
(any number of classes).";

#[derive(Parser, Debug)]
#[command(name = "imbal", version, about = "Confusion-matrix indices for imbalanced classification", after_help = INDEX_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate indices on a confusion matrix or a label-pair file.
    Eval(EvalArgs),
    /// Audit indices against the three invariance conditions.
    Audit(AuditArgs),
    /// Print the closed-form lower and upper bound of an index.
    Bounds(BoundsArgs),
    /// Run a distortion experiment described by a JSON spec.
    Simulate(SimulateArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// CSV of integer counts, one row per true class, optional header of labels.
    #[arg(long, conflicts_with = "labels", required_unless_present = "labels")]
    matrix: Option<PathBuf>,
    /// CSV of `true,predicted` label pairs.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Class order for --labels, comma separated. Defaults to first appearance.
    #[arg(long, value_delimiter = ',', requires = "labels")]
    classes: Option<Vec<String>>,
    /// Indices to evaluate, comma separated or repeated.
    #[arg(long = "index", value_delimiter = ',', conflicts_with = "all")]
    indices: Vec<IndexId>,
    /// Every index that applies to the matrix (the default).
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Print values with full precision instead of 6 decimals.
    #[arg(long)]
    full_precision: bool,
    /// Also write the confusion matrix as CSV.
    #[arg(long)]
    emit_matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long = "index", value_delimiter = ',', conflicts_with = "all", required_unless_present = "all")]
    indices: Vec<IndexId>,
    /// All 13 audited indices.
    #[arg(long)]
    all: bool,
    /// Conditions to audit, comma separated.
    #[arg(long = "cond", value_delimiter = ',', default_value = "1,2,3", value_parser = clap::value_parser!(u8).range(1..=3))]
    conditions: Vec<u8>,
    /// Randomized trials for Condition 1.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Class counts for Condition 2: `2..6`, `3` or `2,3,4`.
    #[arg(long = "c", default_value = "2..4", value_parser = parse_class_range)]
    class_range: ClassRange,
    /// Class count of the Condition 3 collapse family.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    collapse_c: u64,
    #[arg(long, env = "IMBAL_SEED", default_value_t = audit::condition1::DEFAULT_SEED)]
    seed: u64,
    /// Compare verdicts with the expected pattern; exit 3 on any mismatch.
    #[arg(long)]
    check_paper: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct ClassRange(Vec<usize>);

fn parse_class_range(s: &str) -> Result<ClassRange, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a class count"));
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if out.iter().any(|&c| c < 2) {
        return Err("class counts must be at least 2".into());
    }
    Ok(ClassRange(out))
}

#[derive(Args, Debug)]
struct BoundsArgs {
    index: IndexId,
    /// Number of classes.
    classes: usize,
    /// Test-set class counts, comma separated (needed for auroc_ova).
    #[arg(long, value_delimiter = ',')]
    profile: Option<Vec<u64>>,
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Experiment spec (JSON).
    spec: PathBuf,
    /// Directory for the long-form and summary CSVs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Six decimals with trailing zeros removed, or the shortest round-trip form.
fn fmt_value(v: f64, full: bool) -> String {
    if full {
        return v.to_string();
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(args: &EvalArgs) -> Result<LabeledMatrix, Failure> {
    if let Some(p) = &args.matrix {
        let f = File::open(p).map_err(|e| io_err(p, e))?;
        return read_matrix_csv(f).map_err(|e| Failure::Input(format!("{}: {e}", p.display())));
    }
    let p = args.labels.as_ref().expect("clap requires one input");
    let f = File::open(p).map_err(|e| io_err(p, e))?;
    read_labels_csv(f, args.classes.as_deref()).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let lm = load(&args)?;
    let m = &lm.matrix;
    let indices: Vec<IndexId> = if args.indices.is_empty() {
        IndexId::ALL.into_iter().filter(|id| id.applies_to(m.class_count())).collect()
    } else {
        args.indices.clone()
    };
    let mut evals = Vec::with_capacity(indices.len());
    for id in indices {
        evals.push(id.evaluation(m)?);
    }
    if let Some(p) = &args.emit_matrix {
        let f = File::create(p).map_err(|e| io_err(p, e))?;
        write_matrix_csv(f, m, lm.labels.as_deref())?;
    }
    let mut out = open_output(args.output.as_deref())?;
    let wr = |e: io::Error| Failure::Input(e.to_string());
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &evals).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out).map_err(wr)?;
        }
        Format::Csv => {
            writeln!(out, "index,value,status").map_err(wr)?;
            for e in &evals {
                let (value, status) = match &e.value {
                    IndexValue::Defined(v) => (fmt_value(*v, args.full_precision), "ok".to_string()),
                    IndexValue::Undefined(r) => ("UNDEFINED".to_string(), r.to_string()),
                };
                writeln!(out, "{},{value},{status}", e.index).map_err(wr)?;
            }
        }
    }
    out.flush().map_err(wr)
}

fn cmd_audit(args: AuditArgs) -> Result<(), Failure> {
    let indices: Vec<IndexId> = if args.all {
        IndexId::AUDITED.to_vec()
    } else {
        args.indices.clone()
    };
    let cfg = AuditConfig {
        conditions: args.conditions.clone(),
        condition1: Condition1Config {
            trials: args.trials as usize,
            seed: args.seed,
            ..Default::default()
        },
        condition2: audit::Condition2Config {
            class_counts: args.class_range.0.clone(),
            ..Default::default()
        },
        collapse_classes: args.collapse_c as usize,
        collapsed_class: 0,
    };
    let reports = audit::audit_all(&indices, &cfg)?;
    let json = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Input(e.to_string()))?;
    match &args.output {
        Some(p) => {
            fs::write(p, json + "\n").map_err(|e| io_err(p, e))?;
            for r in &reports {
                let v1 = r.condition1.as_ref().map(|c| format!("{:?}", c.verdict));
                let v2 = r.condition2.as_ref().map(|c| format!("{:?}", c.verdict));
                let v3 = r.condition3.as_ref().map(|c| format!("{:?}", c.verdict));
                let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
                println!("{:<12} c1={} c2={} c3={}", r.index.id(), show(v1), show(v2), show(v3));
            }
        }
        None => println!("{json}"),
    }
    if args.check_paper {
        let mismatches = check_conformance(&reports);
        if !mismatches.is_empty() {
            let lines: Vec<String> = mismatches
                .iter()
                .map(|m| format!("{} condition {}: expected {}, found {}", m.index, m.condition, m.expected, m.found))
                .collect();
            return Err(Failure::Mismatch(lines.join("\n")));
        }
        eprintln!("conformance: {} indices match the expected verdicts", reports.len());
    }
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), Failure> {
    if let Some(p) = &args.profile {
        if p.len() != args.classes {
            return Err(Failure::Input(format!(
                "profile has {} counts but {} classes were requested",
                p.len(),
                args.classes
            )));
        }
    }
    let (lo, hi) = theoretical_bounds(args.index, args.classes, args.profile.as_deref())?;
    println!("{} {}", fmt_value(lo, args.full_precision), fmt_value(hi, args.full_precision));
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.spec).map_err(|e| io_err(&args.spec, e))?;
    let spec = ExperimentSpec::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.spec.display())))?;
    let result = run_experiment(&spec)?;
    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let long = args.out.join(format!("{}_long.csv", spec.name));
    let summary = args.out.join(format!("{}_summary.csv", spec.name));
    write_long_csv(File::create(&long).map_err(|e| io_err(&long, e))?, &result)?;
    write_summary_csv(File::create(&summary).map_err(|e| io_err(&summary, e))?, &result)?;
    for (index, sd) in result.digest() {
        let sd = sd.map_or_else(|| "UNDEFINED".to_string(), |v| fmt_value(v, false));
        println!("{:<12} mean_std_dev={sd}", index.id());
    }
    eprintln!("wrote {} and {}", long.display(), summary.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("conformance mismatch:\n{msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
