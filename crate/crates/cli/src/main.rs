use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use memlit_cli::report::{render_comparison, render_text, to_json};
use memlit_cli::{compare_loaded, dot, load, run_loaded, CliError, Model};
use memlit_core::Options;

#[derive(Parser)]
#[command(name = "memlit", version, about = "Exhaustive litmus-test checker for SC, x86-TSO and C++11")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a litmus file under one or all models.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Sc,
    Tso,
    Cxx11,
    All,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    model: ModelArg,
    /// Print a per-model comparison table (runs every model).
    #[arg(long)]
    compare: bool,
    /// Write witness graphs to this directory.
    #[arg(long, value_name = "DIR")]
    dot: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    max_states: usize,
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    max_candidates: usize,
    /// Do not let cas_weak fail when the values match.
    #[arg(long)]
    no_weak_spurious: bool,
    /// Require the seq_cst order to embed hb and mo (default).
    #[arg(long, overrides_with = "no_strict_s")]
    strict_s: bool,
    #[arg(long, overrides_with = "strict_s")]
    no_strict_s: bool,
    /// Write a flat JSON summary to this file.
    #[arg(long, value_name = "FILE")]
    json_ish: Option<PathBuf>,
}

fn check(args: &CheckArgs) -> Result<i32, CliError> {
    let opts = Options {
        weak_spurious: !args.no_weak_spurious,
        max_states: args.max_states,
        max_candidates: args.max_candidates,
        strict_s: !args.no_strict_s,
    };
    let loaded = load(&args.file)?;
    let (report, comparison) = if args.compare {
        let cmp = compare_loaded(&loaded, &opts)?;
        print!("{}", render_comparison(&cmp));
        (cmp.report.clone(), Some(cmp))
    } else {
        let models: Vec<Model> = match args.model {
            ModelArg::Sc => vec![Model::Sc],
            ModelArg::Tso => vec![Model::Tso],
            ModelArg::Cxx11 => vec![Model::Cxx11],
            ModelArg::All => Model::ALL.to_vec(),
        };
        let report = run_loaded(&loaded, &models, &opts)?;
        print!("{}", render_text(&report));
        (report, None)
    };
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = &args.dot {
        for path in dot::export_dot(&report, dir, &opts)? {
            println!("  wrote {}", path.display());
        }
    }
    let code = report.exit_code();
    if let Some(path) = &args.json_ish {
        let text = serde_json::to_string_pretty(&to_json(&report, comparison.as_ref(), code))
            .expect("json values serialize");
        std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Check(args) = &cli.command;
    let code = check(args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
