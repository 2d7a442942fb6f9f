use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use ccgen::analysis::{Command, Overrides};
use ccgen::{emit_structured, emit_text, parse_system, run_analysis};
use clap::{Parser, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Dims,
    Tabular,
    Cc,
    Syzygies,
    Resolution,
    Full,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Dims => Command::Dims,
            Cmd::Tabular => Command::Tabular,
            Cmd::Cc => Command::Cc,
            Cmd::Syzygies => Command::Syzygies,
            Cmd::Resolution => Command::Resolution,
            Cmd::Full => Command::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Formal integrability, Janet tabulars and compatibility conditions of
/// linear PDE systems, in exact arithmetic.
#[derive(Debug, Parser)]
#[command(name = "ccgen", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// System file; standard input when absent or `-`.
    file: Option<PathBuf>,
    /// Highest compatibility-condition order searched, counted from the system order.
    #[arg(long)]
    max_order: Option<usize>,
    /// Number of prolongations in the dimension table and integrability test.
    #[arg(long)]
    depth: Option<usize>,
    /// Seed for the search of δ-regular coordinates.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(file: &Option<PathBuf>) -> Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let text = read_input(&cli.file)?;
    let file = match parse_system(&text) {
        Ok(f) => f,
        Err(e) => {
            let name = cli.file.as_ref().map_or("<stdin>".to_string(), |p| p.display().to_string());
            eprintln!("{name}:{e}");
            return Ok(EXIT_USAGE);
        }
    };
    let overrides = Overrides { max_order: cli.max_order, depth: cli.depth, seed: cli.seed };
    let report = run_analysis(&file, cli.command.into(), overrides)?;
    let body = match cli.format {
        Format::Text => emit_text(&report),
        Format::Structured => emit_structured(&report),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, &body).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(if report.violated() {
        EXIT_INVARIANT
    } else if report.partial {
        EXIT_PARTIAL
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(_) => ExitCode::from(EXIT_INVARIANT),
    }
}
