//! `guidecheck`: check FJ programs against a trace guideline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use guidecheck::check::{analyze, Inputs, Mode, Options, Report, MAX_RUNS};

#[derive(Parser)]
#[command(name = "guidecheck", version, about = "Check that every trace of a program follows a guideline automaton")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer effects, solve for infinite behaviour, and report verdicts.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Abstract,
    Concrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Program source files, read as one program.
    #[arg(long = "program", required = true, num_args = 1..)]
    programs: Vec<PathBuf>,
    /// Guideline automaton.
    #[arg(long)]
    guideline: PathBuf,
    /// Effects of intrinsic methods.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Abstract)]
    mode: ModeArg,
    /// Call budget for each counterexample run.
    #[arg(long, default_value_t = 12)]
    fuel: usize,
    /// Check only this method, written `Class.method`.
    #[arg(long)]
    entry: Option<String>,
    /// Infer only what the entry can reach (needs --entry).
    #[arg(long, requires = "entry")]
    demand_driven: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: AnalyzeArgs) -> Result<Report, String> {
    let inputs = Inputs::load(&args.programs, &args.guideline, args.config.as_deref()).map_err(|e| e.to_string())?;
    let opts = Options {
        mode: match args.mode {
            ModeArg::Abstract => Mode::Abstract,
            ModeArg::Concrete => Mode::Concrete,
        },
        fuel: args.fuel,
        entry: args.entry,
        demand: args.demand_driven,
        max_runs: MAX_RUNS,
    };
    analyze(&inputs, &opts).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let Command::Analyze(args) = Cli::parse().command;
    let (format, out) = (args.report, args.out.clone());
    let report = match run(args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
