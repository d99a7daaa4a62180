//! Batch execution and CSV export.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dqcluster::sim::{monte_carlo_keep, BatchStats, RunResult, Scenario};
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, serialize_scenario};
use crate::CliError;

pub const STATS_HEADER: &str = "time,mean,std,p_minus_3sigma,p_plus_3sigma";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub seed: u64,
    pub time: f64,
    pub reason: String,
}

/// Everything needed to reproduce a results bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config_hash: String,
    pub base_seed: u64,
    pub runs_requested: usize,
    pub runs_succeeded: usize,
    pub failures: Vec<FailedRun>,
    pub dt: f64,
    pub samples: usize,
    pub channels: Vec<String>,
    pub files: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn time_str(k: usize, dt: f64) -> String {
    format!("{:.6}", k as f64 * dt)
}

fn finite(channel: &str, k: usize, dt: f64, xs: &[f64]) -> Result<(), CliError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::NonFinite {
            channel: channel.to_string(),
            time: k as f64 * dt,
        })
    }
}

fn write_stats(dir: &Path, stats: &BatchStats, files: &mut Vec<String>) -> Result<(), CliError> {
    for (c, name) in stats.names.iter().enumerate() {
        let rel = format!("stats/{name}.csv");
        let path = dir.join(&rel);
        let mut w = create(&path)?;
        let err = io_err(&path);
        let mut body = String::with_capacity(64 * stats.len() + 64);
        body.push_str(STATS_HEADER);
        body.push('\n');
        for k in 0..stats.len() {
            let (m, s) = (stats.mean[c][k], stats.std[c][k]);
            let (lo, hi) = (m - 3.0 * s, m + 3.0 * s);
            finite(name, k, stats.dt, &[m, s, lo, hi])?;
            body.push_str(&format!("{},{m},{s},{lo},{hi}\n", time_str(k, stats.dt)));
        }
        w.write_all(body.as_bytes())
            .and_then(|_| w.flush())
            .map_err(err)?;
        files.push(rel);
    }
    Ok(())
}

fn write_run(dir: &Path, run: &RunResult, files: &mut Vec<String>) -> Result<(), CliError> {
    let rel = format!("runs/run_{}.csv", run.seed);
    let path = dir.join(&rel);
    let mut w = create(&path)?;
    let mut body = String::from("time");
    for n in run.names {
        body.push(',');
        body.push_str(n);
    }
    body.push('\n');
    for k in 0..run.len() {
        body.push_str(&time_str(k, run.dt));
        for (c, n) in run.names.iter().enumerate() {
            let x = run.series[c][k];
            finite(n, k, run.dt, &[x])?;
            body.push_str(&format!(",{x}"));
        }
        body.push('\n');
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&path))?;
    files.push(rel);
    Ok(())
}

/// Runs a batch and writes `scenario.toml`, `stats/<channel>.csv`, the first
/// `keep_runs` runs under `runs/`, and `manifest.json` into `out_dir`.
pub fn run_and_export(
    scenario: &Scenario,
    n_runs: usize,
    base_seed: u64,
    keep_runs: usize,
    out_dir: &Path,
) -> Result<Manifest, CliError> {
    if n_runs < 2 {
        return Err(CliError::Argument(format!(
            "--runs must be at least 2, got {n_runs}"
        )));
    }
    let (stats, kept) = monte_carlo_keep(scenario, n_runs, base_seed, keep_runs)?;

    for sub in [
        PathBuf::new(),
        PathBuf::from("stats"),
        PathBuf::from("runs"),
    ] {
        let p = out_dir.join(sub);
        fs::create_dir_all(&p).map_err(io_err(&p))?;
    }
    let mut files = Vec::new();
    let scen_path = out_dir.join("scenario.toml");
    fs::write(&scen_path, serialize_scenario(scenario)?).map_err(io_err(&scen_path))?;
    files.push("scenario.toml".to_string());
    write_stats(out_dir, &stats, &mut files)?;
    for run in &kept {
        write_run(out_dir, run, &mut files)?;
    }

    let manifest = Manifest {
        tool: "dqcluster".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.name.clone(),
        config_hash: config_hash(scenario)?,
        base_seed,
        runs_requested: stats.requested,
        runs_succeeded: stats.succeeded,
        failures: stats
            .failures
            .iter()
            .map(|(seed, f)| FailedRun {
                seed: *seed,
                time: f.time,
                reason: f.reason.clone(),
            })
            .collect(),
        dt: stats.dt,
        samples: stats.len(),
        channels: stats.names.iter().map(|s| s.to_string()).collect(),
        files,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}
