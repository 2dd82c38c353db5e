use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairsample::experiment::{
    self, emit, emit_to_path, parse_config_text, ExperimentConfig, ExperimentError, Format, Report, SynthConfig,
};
use fairsample::Execution;

/// Fairness-aware oversampling experiment runner.
#[derive(Debug, Parser)]
#[command(name = "fairsample", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validated run of one preprocessor.
    Run(RunArgs),
    /// Run once per configured imbalance level.
    Sweep(RunArgs),
    /// Feature importance with and without the configured preprocessor.
    Importance(RunArgs),
    /// Write the synthetic biased dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Exec {
    Sequential,
    Parallel,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config (.json, otherwise TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Record per-stage wall-clock timings.
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value = "parallel")]
    execution: Exec,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Generator settings (.json, otherwise TOML); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

fn execution(e: Exec) -> Execution {
    match e {
        Exec::Sequential => Execution::Sequential,
        Exec::Parallel => Execution::Parallel,
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.record_timings |= args.timings;
    Ok(cfg)
}

fn write_report(report: &Report, args: &RunArgs) -> Result<(), Failure> {
    let format = args.format.into();
    match &args.out {
        Some(path) => emit_to_path(report, format, path).map_err(|e| Failure {
            kind: "unwritable_output",
            message: format!("{}: {e}", path.display()),
        }),
        None => Ok(emit(report, format, std::io::stdout().lock())?),
    }
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(ExperimentError::from)?;
            parse_config_text::<SynthConfig>(path, &text)?
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let data = experiment::synth::generate(&cfg)?;
    match &args.out {
        Some(path) => write_csv_file(&data, path),
        None => Ok(experiment::synth::write_csv(&data, std::io::stdout().lock())?),
    }
}

fn write_csv_file(data: &fairsample::Dataset, path: &Path) -> Result<(), Failure> {
    let unwritable = |e: &dyn std::fmt::Display| Failure {
        kind: "unwritable_output",
        message: format!("{}: {e}", path.display()),
    };
    let file = std::fs::File::create(path).map_err(|e| unwritable(&e))?;
    experiment::synth::write_csv(data, std::io::BufWriter::new(file)).map_err(|e| unwritable(&e))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load(&args)?;
            let report = experiment::run_experiment(&cfg, execution(args.execution))?;
            write_report(&Report::Run(report), &args)
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            let report = experiment::imbalance_sweep(&cfg, execution(args.execution))?;
            write_report(&Report::Sweep(report), &args)
        }
        Command::Importance(args) => {
            let cfg = load(&args)?;
            let report = experiment::feature_importance_report(&cfg, execution(args.execution))?;
            write_report(&Report::Importance(report), &args)
        }
        Command::Synth(args) => synth(&args),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(std::io::stderr().lock(), "{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().trim(), 2),
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f.kind, &f.message, 1),
    }
}
