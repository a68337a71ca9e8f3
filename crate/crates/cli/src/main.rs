//! Experiment runner: every subcommand reads one JSON config, writes its
//! reports atomically into the output directory together with a copy of
//! the config and a checksummed manifest, and exits nonzero when a check
//! fails (exit 1) or the config is invalid (exit 2).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::ExperimentConfig;
use output::OutputDir;

#[derive(Parser)]
#[command(
    name = "wsemb",
    about = "Weighted Sobolev embedding workbench: condition checks, embedding \
             inequalities, traveling-bump counterexamples, radial estimates, and \
             a constrained eigenpair solver",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports (created if missing); falls back to
    /// the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Double the grid resolution and re-emit reports for Richardson
    /// comparison.
    #[arg(long)]
    refine: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Certify potential conditions (gradient domination, comparability,
    /// envelope decay, ...).
    CheckPotential(RunArgs),
    /// Verify the embedding inequalities over a seeded field battery.
    VerifyEmbedding(RunArgs),
    /// Build and certify a traveling-bump sequence.
    Counterexample(RunArgs),
    /// Radial battery: Strauss decay and the compact-embedding tail bound.
    Radial(RunArgs),
    /// Minimize the constrained functional and extract the eigenpair.
    Solve(RunArgs),
}

#[derive(Serialize)]
struct StatusLine<'a> {
    status: &'a str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failures: Vec<String>,
    out_dir: String,
}

fn emit_status(line: &StatusLine) {
    println!("{}", serde_json::to_string(line).expect("status serializes"));
}

fn run(name: &str, args: &RunArgs) -> ExitCode {
    let bytes = match std::fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            emit_status(&StatusLine {
                status: "config-error",
                command: name,
                reason: Some(format!("cannot read {}: {e}", args.config.display())),
                failures: vec![],
                out_dir: String::new(),
            });
            return ExitCode::from(2);
        }
    };
    let cfg = match ExperimentConfig::parse(&bytes, name) {
        Ok(c) => c,
        Err(e) => {
            emit_status(&StatusLine {
                status: "config-error",
                command: name,
                reason: Some(format!("{e:#}")),
                failures: vec![],
                out_dir: args
                    .out
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            });
            return ExitCode::from(2);
        }
    };
    let out_path = match args
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
    {
        Some(p) => p,
        None => {
            emit_status(&StatusLine {
                status: "config-error",
                command: name,
                reason: Some("no output directory: pass --out or set out_dir".to_string()),
                failures: vec![],
                out_dir: String::new(),
            });
            return ExitCode::from(2);
        }
    };
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut out = match OutputDir::create(&out_path) {
        Ok(o) => o,
        Err(e) => {
            emit_status(&StatusLine {
                status: "error",
                command: name,
                reason: Some(format!("{e:#}")),
                failures: vec![],
                out_dir: out_path.display().to_string(),
            });
            return ExitCode::from(1);
        }
    };
    let result = match name {
        "check-potential" => commands::check_potential::run(&cfg, &mut out, seed, args.refine),
        "verify-embedding" => commands::verify_embedding::run(&cfg, &mut out, seed, args.refine),
        "counterexample" => commands::counterexample::run(&cfg, &mut out, seed, args.refine),
        "radial" => commands::radial_cmd::run(&cfg, &mut out, seed, args.refine),
        "solve" => commands::solve::run(&cfg, &mut out, seed, args.refine),
        _ => unreachable!("clap restricts the subcommand set"),
    };
    match result {
        Ok(status) => {
            if let Err(e) = out.finalize(&bytes) {
                emit_status(&StatusLine {
                    status: "error",
                    command: name,
                    reason: Some(format!("{e:#}")),
                    failures: vec![],
                    out_dir: out_path.display().to_string(),
                });
                return ExitCode::from(1);
            }
            if status.ok() {
                emit_status(&StatusLine {
                    status: "ok",
                    command: name,
                    reason: None,
                    failures: vec![],
                    out_dir: out_path.display().to_string(),
                });
                ExitCode::SUCCESS
            } else {
                emit_status(&StatusLine {
                    status: "failed",
                    command: name,
                    reason: None,
                    failures: status.failures,
                    out_dir: out_path.display().to_string(),
                });
                ExitCode::from(1)
            }
        }
        Err(e) => {
            emit_status(&StatusLine {
                status: "error",
                command: name,
                reason: Some(format!("{e:#}")),
                failures: vec![],
                out_dir: out_path.display().to_string(),
            });
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::CheckPotential(a) => run("check-potential", a),
        Command::VerifyEmbedding(a) => run("verify-embedding", a),
        Command::Counterexample(a) => run("counterexample", a),
        Command::Radial(a) => run("radial", a),
        Command::Solve(a) => run("solve", a),
    }
}
