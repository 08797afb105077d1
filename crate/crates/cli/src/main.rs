//! `spca`: command-line driver for the sparse PCA solvers, reduction
//! generators and inequality checks.
//!
//! Exit codes: 0 success, 1 input error, 2 guard or budget exceeded,
//! 3 verification failure.

mod args;
mod check;
mod experiment;
mod generate;
mod report;
mod solve;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};
use report::{write_json, RunReport, Session};
use spca_core::Budget;

const EXIT_INPUT: u8 = 1;
const EXIT_GUARD: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn budget(cli: &Cli) -> Result<Budget> {
    let mut b = Budget::from_env();
    if let Some(ops) = cli.budget {
        if !(ops > 0.0) {
            anyhow::bail!(spca_core::Error::InvalidArgument(format!("--budget must be positive, got {ops}")));
        }
        b.exact_ops = ops;
    }
    Ok(b)
}

fn emit(report: &RunReport, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, report),
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, report)?;
            writeln!(stdout)?;
            Ok(())
        }
    }
}

/// Returns the exit code for a successful run.
fn run(cli: &Cli, argv: Vec<String>) -> Result<u8> {
    let budget = budget(cli)?;
    let session = Session::new(argv, cli.seed);
    let seed = cli.seed;
    match &cli.command {
        Command::Solve(a) => emit(&solve::run(a, &budget, session, seed)?, a.out.as_deref())?,
        Command::Generate(g) => emit(&generate::run(g, &budget, session, seed)?, None)?,
        Command::Verify(a) => {
            let (report, passed) = check::run(a, &budget, session, seed)?;
            emit(&report, a.out.as_deref())?;
            if !passed {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Experiment(a) => emit(&experiment::run(a, &budget, session, seed)?, a.out.as_deref())?,
    }
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let guard = err
        .chain()
        .filter_map(|e| e.downcast_ref::<spca_core::Error>())
        .any(spca_core::Error::is_guard);
    if guard {
        EXIT_GUARD
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
