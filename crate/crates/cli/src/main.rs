use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use xyz_sim::config::Document;
use xyz_sim::output;
use xyz_sim::presets::{self, PRESETS};
use xyz_sim::Overrides;

/// Simulate two qubits with time-dependent XYZ exchange.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = ".")]
    output: PathBuf,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Integrator step for numeric runs, overriding the config.
    #[arg(long, global = true)]
    step: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a config once and write `<stem>.csv`. A sweep block is ignored.
    Run { config: PathBuf },
    /// Run every value of the config's sweep block and write a summary.
    Sweep { config: PathBuf },
    /// Run a figure preset, `all` of them, or `list` the ids.
    Figures { id: String },
}

fn load(path: &Path) -> Result<(Document, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = Document::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace").to_string();
    Ok((doc, stem))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn main_inner(cli: Cli) -> Result<()> {
    if let Some(step) = cli.step {
        if !(step > 0.0 && step.is_finite()) {
            bail!("--step must be positive, got {step}");
        }
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let overrides = Overrides { step: cli.step };
    match cli.command {
        Command::Run { config } => {
            let (doc, stem) = load(&config)?;
            report(&output::process(&doc, &stem, &cli.output, overrides, false)?);
        }
        Command::Sweep { config } => {
            let (doc, stem) = load(&config)?;
            if doc.config.sweep.is_none() {
                bail!("{} has no [sweep] section", config.display());
            }
            report(&output::process(&doc, &stem, &cli.output, overrides, true)?);
        }
        Command::Figures { id } => match id.as_str() {
            "list" => {
                for p in PRESETS {
                    let doc = p.document()?;
                    println!("{:<14}{}", p.id, doc.config.description.unwrap_or_default());
                }
            }
            "all" => {
                for p in PRESETS {
                    let doc = p.document()?;
                    report(&output::process(&doc, p.id, &cli.output, overrides, true)?);
                }
            }
            other => {
                let Some(p) = presets::get(other) else {
                    bail!("unknown figure `{other}`; try `simulate figures list`");
                };
                report(&output::process(&p.document()?, p.id, &cli.output, overrides, true)?);
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
