//! `heatasym`: batch front end. Reads a TOML run configuration, evaluates it
//! and writes CSV or a JSON document.
//!
//! Exit codes: 0 success, 2 bad configuration or I/O, 3 invalid input
//! (profile, arguments, unsupported case), 4 numerical failure, 5 a
//! verification command found a failing check.

mod config;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "heatasym", version, about = "Long-time asymptotics of the heat equation")]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output` in the configuration. `-` is stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides `format` in the configuration.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Suppress the summary line on stderr.
    #[arg(long)]
    quiet: bool,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_CHECK: u8 = 5;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("heatasym: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(o) = args.out {
        cfg.output = Some(o);
    }

    let table = match run::run(&cfg) {
        Ok(t) => t,
        Err(e) if e.is_numerical() => return fail(EXIT_NUMERICAL, e),
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let text = match cfg.format {
        Format::Csv => output::csv(&table),
        Format::Doc => match output::doc(&cfg, &table) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
    };
    let written = match cfg.output.as_deref() {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, &text),
        _ => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(EXIT_CONFIG, format!("cannot write output: {e}"));
    }
    if !args.quiet {
        eprintln!(
            "heatasym: {:?} produced {} rows{}",
            cfg.command,
            table.rows.len(),
            if table.passed { "" } else { "; checks FAILED" }
        );
    }
    if table.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK)
    }
}
