use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dqcluster::control::LawVariant;
use dqcluster::sim::{ControllerMode, Scenario};
use dqcluster_cli::verify::{run_verify, Level};
use dqcluster_cli::{parse_scenario, presets, run_and_export, serialize_scenario};

#[derive(Parser)]
#[command(
    name = "dqcluster",
    version,
    about = "Multi-robot cluster simulator with gain-scheduled dual quaternion control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fixed,
    Adaptive,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo batch and write CSV statistics plus a manifest.
    Run {
        /// Scenario TOML file or bundled preset name.
        scenario: String,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Base seed; defaults to the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "DQCLUSTER_OUT_DIR", default_value = "results")]
        out: PathBuf,
        /// Number of individual runs to export in full.
        #[arg(long, default_value_t = 0)]
        keep_runs: usize,
        /// Override the scenario's controller mode.
        #[arg(long, value_enum)]
        controller: Option<Mode>,
    },
    /// Run the numerical verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
        /// Use the flipped integrator signs (the Lyapunov checks are expected to fail).
        #[arg(long)]
        printed_law: bool,
    },
    /// Bundled scenarios.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print a preset as TOML.
    Show {
        name: String,
    },
}

fn load(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_scenario(&text).with_context(|| format!("in {}", path.display()));
    }
    if presets::preset_text(arg).is_some() {
        return Ok(presets::preset(arg)?);
    }
    bail!("'{arg}' is neither a file nor a preset (see `dqcluster presets list`)")
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            scenario,
            runs,
            seed,
            out,
            keep_runs,
            controller,
        } => {
            let mut s = load(&scenario)?;
            if let Some(m) = controller {
                s.controller = match m {
                    Mode::Fixed => ControllerMode::Fixed,
                    Mode::Adaptive => ControllerMode::Adaptive,
                };
            }
            let seed = seed.unwrap_or(s.seed);
            let manifest = run_and_export(&s, runs, seed, keep_runs, &out)?;
            println!(
                "{}: {}/{} runs succeeded, {} samples per channel, written to {}",
                manifest.scenario,
                manifest.runs_succeeded,
                manifest.runs_requested,
                manifest.samples,
                out.display()
            );
            for f in &manifest.failures {
                println!("  run {} failed at t = {:.3}: {}", f.seed, f.time, f.reason);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level, printed_law } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let law = if printed_law {
                LawVariant::Printed
            } else {
                LawVariant::Corrected
            };
            let checks = run_verify(level, law);
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            println!("{} passed, {failed} failed", checks.len() - failed);
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Presets { action } => {
            match action {
                PresetAction::List => {
                    for n in presets::names() {
                        println!("{n}");
                    }
                }
                PresetAction::Show { name } => {
                    print!("{}", serialize_scenario(&presets::preset(&name)?)?)
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
