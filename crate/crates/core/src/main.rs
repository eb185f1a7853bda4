use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loopgroup::catalog::CATALOG;
use loopgroup::runner::{apply_overrides, run_config_file};
use loopgroup::scenario::{ScenarioConfig, ScenarioError};

/// Scenario runner for loop-group factorization, tau and Virasoro checks.
#[derive(Parser)]
#[command(name = "loopgroup", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write the JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the seed of a seeded f.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the jet order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Write a CSV coefficient dump of M, E, u, v or lntau.
    Dump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every named check with its anchor and default tolerance.
    ListChecks,
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, out, seed, order } => {
            let report = match run_config_file(&config, seed, order) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Err(e) = std::fs::write(&out, text + "\n") {
                return fail(&ScenarioError::Io { path: out.display().to_string(), message: e.to_string() });
            }
            let s = &report.summary;
            println!("{} checks, {} diagnostics, {} failed -> {}", s.checks, s.diagnostics, s.failed.len(), out.display());
            for name in &s.failed {
                println!("FAIL {name}");
            }
            if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Dump { config, target, out } => {
            let run = || -> Result<usize, ScenarioError> {
                let mut cfg = ScenarioConfig::load(&config)?;
                apply_overrides(&mut cfg, None, None)?;
                let base = config.parent().map(|p| p.to_path_buf()).unwrap_or_default();
                let scn = cfg.build(&base)?;
                loopgroup::dump::write_dump(&scn, &target, &out)
            };
            match run() {
                Ok(n) => {
                    println!("{n} rows -> {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::ListChecks => {
            for c in CATALOG {
                let role = match c.role {
                    loopgroup::catalog::Role::Check => "check",
                    loopgroup::catalog::Role::Diagnostic => "diagnostic",
                };
                println!("{}\t{}\t{:e}\t{}\t{}", c.name, c.suite.name(), c.tolerance, role, c.anchor);
            }
            ExitCode::SUCCESS
        }
    }
}
