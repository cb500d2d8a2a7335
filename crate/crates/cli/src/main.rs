use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod commands;

use commands::{Command, Status};

/// Verification workbench for polynomials preserving nonnegative matrices.
#[derive(Debug, Parser)]
#[command(name = "nnpoly", version, about)]
struct Cli {
    /// Worker threads (defaults to machine parallelism).
    #[arg(long, global = true, env = "NNPOLY_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Verified) => ExitCode::SUCCESS,
        Ok(Status::Falsified) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let outcome = commands::execute(&cli.command)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.envelope(&cli.command)?)?;
            s.push('\n');
            s
        }
        Format::Csv => match &outcome.csv {
            Some(csv) => csv.clone(),
            None => anyhow::bail!("`{}` has no CSV form; use --format json or human", cli.command.name()),
        },
        Format::Human => outcome.human.clone(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome.status)
}
