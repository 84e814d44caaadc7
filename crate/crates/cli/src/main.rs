//! Command-line front end: runs verification suites from a TOML
//! configuration and dumps combinatorial enumerations.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use graphprod_core::report::{self, RunConfig, ALL_SUITES};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gpw", about = "Graph-product verification suites", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute verification suites and print one line per check.
    Run {
        /// TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Suites to run (overrides the config; may repeat). `all` selects
        /// every suite.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Write machine-readable records (one JSON object per line).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a deterministic enumeration for the configured graph.
    Enumerate {
        /// TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        /// One of: words, cliques, T, S_w, C_gamma.
        #[arg(long)]
        what: String,
    },
}

fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg: RunConfig =
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    Ok(cfg)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            suites,
            seed,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if !suites.is_empty() {
                if suites.iter().any(|s| s == "all") {
                    cfg.suites = ALL_SUITES.iter().map(|s| s.to_string()).collect();
                } else {
                    cfg.suites = suites;
                }
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rep = report::run(&cfg)?;
            println!("config {}  seed {}", rep.config_hash, rep.seed);
            println!(
                "{:<44} {:>12} {:>12} {:>9}  status",
                "check", "measured", "bound", "tol"
            );
            for r in &rep.records {
                println!(
                    "{:<44} {:>12.4e} {:>12.4e} {:>9.1e}  {}",
                    r.id(),
                    r.measured,
                    r.bound,
                    r.tolerance,
                    r.status
                );
            }
            for (suite, ms) in &rep.suite_wall_ms {
                eprintln!("timing {suite}: {ms:.1} ms");
            }
            if let Some(path) = out {
                std::fs::write(&path, rep.record_lines())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let (pass, total) = (
                rep.records.iter().filter(|r| r.passed()).count(),
                rep.records.len(),
            );
            println!("{pass}/{total} checks passed");
            if !rep.pass() {
                std::process::exit(1);
            }
        }
        Command::Enumerate { config, what } => {
            let cfg = load_config(&config)?;
            print!("{}", report::enumerate_dump(&cfg, &what)?);
        }
    }
    Ok(())
}
