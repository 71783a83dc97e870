//! Command-line front end: evaluate one model, compare several, run the
//! bootstrap, emit reports and plots.
//!
//! Exit codes: 0 on success, 1 on runtime/numerical failures, 2 on
//! input/config validation failures.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcroc::dataset::{class_frequencies, load_dataset, EvaluationDataset, LoadOptions};
use mcroc::error::{Error, ErrorClass};
use mcroc::pipeline::{evaluate_dataset, EvalOptions};
use mcroc::plot::{render_bar_chart, render_curve_plot};
use mcroc::report::{write_curve_csv, write_report, ConfigEcho, EvaluationReport};
use mcroc::roc::RocCurve;

#[derive(Parser)]
#[command(
    name = "mcroc",
    version,
    about = "Aggregated multiclass ROC curves and AUC metrics",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one model's per-class scores.
    Evaluate(RunArgs),
    /// Compare several score files over the same samples.
    Compare(CompareArgs),
    /// Evaluate with bootstrap confidence bands.
    Bootstrap(RunArgs),
    /// Print the tool version.
    Version,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Input file: header row, a label column, and score_<class> columns.
    #[arg(long)]
    input: PathBuf,

    /// Name of the label column.
    #[arg(long, default_value = "label")]
    label_col: String,

    /// Score columns in class order (comma separated). Default: every
    /// column named score_<class>, in file order.
    #[arg(long, value_delimiter = ',')]
    score_cols: Option<Vec<String>>,

    /// Threshold grid size for the aggregated curve.
    #[arg(long, default_value_t = 512)]
    grid_size: usize,

    /// Ridge added to the correlation matrix before inversion.
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,

    /// Also compute bootstrap confidence bands.
    #[arg(long)]
    bootstrap: bool,

    /// Bootstrap replicate count (B).
    #[arg(long, default_value_t = 1000)]
    replicates: usize,

    /// Confidence level of the bootstrap band.
    #[arg(long, default_value_t = 0.95)]
    level: f64,

    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Directory for the report, curve CSVs, and plots.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Render SVG plots.
    #[arg(long)]
    plots: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Score files to compare; repeat the flag once per model.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,

    #[arg(long, default_value = "label")]
    label_col: String,

    #[arg(long, value_delimiter = ',')]
    score_cols: Option<Vec<String>>,

    #[arg(long, default_value_t = 512)]
    grid_size: usize,

    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(args) => run_single(args),
        Command::Bootstrap(mut args) => {
            args.bootstrap = true;
            run_single(args)
        }
        Command::Compare(args) => run_compare(args),
        Command::Version => {
            println!("mcroc {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mcroc: error in {}: {err}", err.module());
            match err.class() {
                ErrorClass::Input => ExitCode::from(2),
                ErrorClass::Runtime => ExitCode::from(1),
            }
        }
    }
}

/// Tab for .tsv/.tab files, comma otherwise.
fn delimiter_for(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("tab") => b'\t',
        _ => b',',
    }
}

fn load(path: &Path, label_col: &str, score_cols: &Option<Vec<String>>) -> Result<EvaluationDataset, Error> {
    let options = LoadOptions {
        label_column: label_col.to_string(),
        score_columns: score_cols.clone(),
        delimiter: delimiter_for(path),
    };
    load_dataset(path, &options)
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn eval_options(args: &RunArgs) -> EvalOptions {
    EvalOptions {
        grid_size: args.grid_size,
        ridge: args.ridge,
        seed: args.seed,
        bootstrap: args.bootstrap,
        replicates: args.replicates,
        level: args.level,
    }
}

fn config_echo(args: &RunArgs) -> ConfigEcho {
    ConfigEcho {
        input: Some(args.input.display().to_string()),
        label_column: args.label_col.clone(),
        score_columns: args.score_cols.clone(),
        delimiter: if delimiter_for(&args.input) == b'\t' { "\t".into() } else { ",".into() },
        grid_size: args.grid_size,
        ridge: args.ridge,
        bootstrap_enabled: args.bootstrap,
        replicates: args.replicates,
        level: args.level,
        seed: args.seed,
        out_dir: Some(args.out_dir.display().to_string()),
        plots: args.plots,
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn run_single(args: RunArgs) -> Result<(), Error> {
    validate_run_config(&args)?;
    let dataset = load(&args.input, &args.label_col, &args.score_cols)?;
    let report = evaluate_dataset(&dataset, &eval_options(&args), config_echo(&args))?;

    ensure_dir(&args.out_dir)?;
    write_report(&report, args.out_dir.join("report.json"))?;
    write_outputs(&report, &dataset, &args.out_dir, args.plots)?;

    print_auc_table(&report);
    println!();
    println!("report: {}", args.out_dir.join("report.json").display());
    Ok(())
}

fn validate_run_config(args: &RunArgs) -> Result<(), Error> {
    if args.grid_size < 2 {
        return Err(Error::Config(format!(
            "grid size must be at least 2, got {}",
            args.grid_size
        )));
    }
    if args.ridge.is_nan() || args.ridge < 0.0 {
        return Err(Error::Config(format!("ridge must be >= 0, got {}", args.ridge)));
    }
    if args.bootstrap {
        if args.replicates < 10 {
            return Err(Error::Config(format!(
                "need at least 10 bootstrap replicates, got {}",
                args.replicates
            )));
        }
        if !(args.level > 0.0 && args.level < 1.0) {
            return Err(Error::Config(format!(
                "confidence level must be in (0, 1), got {}",
                args.level
            )));
        }
    }
    Ok(())
}

fn write_outputs(
    report: &EvaluationReport,
    dataset: &EvaluationDataset,
    out_dir: &Path,
    plots: bool,
) -> Result<(), Error> {
    write_curve_csv(&report.curves.aggregated, out_dir.join("curve_aggregated.csv"))?;
    write_curve_csv(&report.curves.micro, out_dir.join("curve_micro.csv"))?;
    for entry in &report.curves.per_class {
        if let Some(curve) = &entry.curve {
            let name = format!("curve_class_{}.csv", sanitize(&entry.class));
            write_curve_csv(curve, out_dir.join(name))?;
        }
    }

    if plots {
        let frequencies = class_frequencies(dataset);
        render_bar_chart(
            &report.dataset.classes,
            &frequencies,
            "Class frequencies",
            out_dir.join("frequencies.svg"),
        )?;
        render_bar_chart(
            &report.dataset.classes,
            &report.gini.weights,
            "Class weights",
            out_dir.join("weights.svg"),
        )?;
        let band = report.bootstrap.as_ref().map(|b| &b.band);
        render_curve_plot(
            &[&report.curves.aggregated],
            band,
            out_dir.join("roc_aggregated.svg"),
        )?;
        let mut overlay: Vec<&RocCurve> = report
            .curves
            .per_class
            .iter()
            .filter_map(|c| c.curve.as_ref())
            .collect();
        overlay.push(&report.curves.aggregated);
        render_curve_plot(&overlay, None, out_dir.join("roc_per_class.svg"))?;
    }
    Ok(())
}

fn print_auc_table(report: &EvaluationReport) {
    let rows = [
        ("gini auc (aggregated curve)", report.auc.table.gini_auc),
        ("gini auc (identity transform)", report.auc.gini_identity_auc),
        ("macro auc", report.auc.table.macro_auc),
        ("micro auc", report.auc.table.micro_auc),
        ("m measure", report.auc.table.m_measure),
    ];
    println!("{:<30} {:>8}", "METRIC", "VALUE");
    for (name, value) in rows {
        println!("{name:<30} {value:>8.4}");
    }
    println!();
    println!("{:<20} {:>8} {:>8}", "CLASS", "WEIGHT", "AUC");
    for (i, class) in report.dataset.classes.iter().enumerate() {
        let weight = report.gini.weights[i];
        match report.auc.table.per_class_auc[i] {
            Some(auc) => println!("{class:<20} {weight:>8.4} {auc:>8.4}"),
            None => println!("{class:<20} {weight:>8.4} {:>8}", "empty"),
        }
    }
}

fn run_compare(args: CompareArgs) -> Result<(), Error> {
    if args.input.len() < 2 {
        return Err(Error::Comparability(format!(
            "need at least 2 score files, got {}",
            args.input.len()
        )));
    }
    let mut datasets = Vec::with_capacity(args.input.len());
    for path in &args.input {
        datasets.push((path.clone(), load(path, &args.label_col, &args.score_cols)?));
    }

    let (first_path, first) = &datasets[0];
    let first_classes: BTreeSet<String> = first.class_names().into_iter().collect();
    for (path, ds) in &datasets[1..] {
        if ds.len() != first.len() {
            return Err(Error::Comparability(format!(
                "{} has {} samples but {} has {}",
                path.display(),
                ds.len(),
                first_path.display(),
                first.len()
            )));
        }
        let classes: BTreeSet<String> = ds.class_names().into_iter().collect();
        if classes != first_classes {
            return Err(Error::Comparability(format!(
                "{} and {} disagree on the class set",
                path.display(),
                first_path.display()
            )));
        }
    }

    ensure_dir(&args.out_dir)?;
    let mut rows = Vec::with_capacity(datasets.len());
    for (path, dataset) in &datasets {
        let run_args = RunArgs {
            input: path.clone(),
            label_col: args.label_col.clone(),
            score_cols: args.score_cols.clone(),
            grid_size: args.grid_size,
            ridge: args.ridge,
            bootstrap: false,
            replicates: 1000,
            level: 0.95,
            seed: args.seed,
            out_dir: args.out_dir.clone(),
            plots: false,
        };
        let report = evaluate_dataset(&dataset.clone(), &eval_options(&run_args), config_echo(&run_args))?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .map(sanitize)
            .unwrap_or_else(|| "model".to_string());
        write_report(&report, args.out_dir.join(format!("report_{stem}.json")))?;
        rows.push((stem, report));
    }

    let table_path = args.out_dir.join("comparison.csv");
    let mut csv = fs::File::create(&table_path).map_err(|source| Error::Io {
        path: table_path.clone(),
        source,
    })?;
    let io_err = |source| Error::Io {
        path: table_path.clone(),
        source,
    };
    writeln!(csv, "model,gini_auc,macro_auc,micro_auc,m_measure").map_err(io_err)?;
    for (stem, report) in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            stem,
            report.auc.table.gini_auc,
            report.auc.table.macro_auc,
            report.auc.table.micro_auc,
            report.auc.table.m_measure,
        )
        .map_err(io_err)?;
    }

    println!(
        "{:<24} {:>10} {:>10} {:>10} {:>10}",
        "MODEL", "GINI", "MACRO", "MICRO", "M"
    );
    for (stem, report) in &rows {
        println!(
            "{:<24} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            stem,
            report.auc.table.gini_auc,
            report.auc.table.macro_auc,
            report.auc.table.micro_auc,
            report.auc.table.m_measure,
        );
    }
    println!();
    println!("comparison table: {}", table_path.display());
    Ok(())
}
