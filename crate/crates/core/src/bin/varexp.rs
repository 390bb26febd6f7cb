use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use varexp::report::{emit, run_text, Command, Format};
use varexp::Error;

/// Run one verification command on a JSON config and write the report.
#[derive(Parser)]
#[command(name = "varexp", version)]
struct Cli {
    /// One of: norm, modular, char, classical-char, ainfty, rh-exponent, rh-verify,
    /// rh-search, openness, matrix-char, reduce, avg-norm, verify-lemma, report.
    command: String,
    /// Config file (for `report`: a JSON report to re-emit).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overridden by VAREXP_OUT_DIR.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "json")]
    format: String,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let format: Format = match cli.format.parse() {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return usage(format!("{}: {e}", cli.config.display())),
    };
    let report = match run_text(command, &text) {
        Ok(r) => r,
        Err(e @ Error::InvalidInput(_)) => return usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let dir = std::env::var_os("VAREXP_OUT_DIR").map_or(cli.out, PathBuf::from);
    match emit(&report, format, &dir) {
        Ok(path) => println!("{}", path.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    for v in report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("FAILED {}: {}", v.name, v.witness.as_deref().unwrap_or("-"));
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
