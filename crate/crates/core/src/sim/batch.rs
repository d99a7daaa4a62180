//! Monte-Carlo batches and per-timestep statistics.

use rayon::prelude::*;

use super::run::{simulate_prepared, RunFailure, RunResult};
use super::scenario::Scenario;
use crate::Error;

/// Per-timestep mean and unbiased standard deviation of every channel over
/// the successful runs of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchStats {
    pub names: &'static [&'static str],
    pub dt: f64,
    pub requested: usize,
    pub succeeded: usize,
    pub failures: Vec<(u64, RunFailure)>,
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

impl BatchStats {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub fn mean_of(&self, name: &str) -> Option<&[f64]> {
        self.index(name).map(|k| self.mean[k].as_slice())
    }

    pub fn std_of(&self, name: &str) -> Option<&[f64]> {
        self.index(name).map(|k| self.std[k].as_slice())
    }

    pub fn len(&self) -> usize {
        self.mean.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Root-mean-square of the per-step std over `[t0, t1]`.
    pub fn window_std(&self, name: &str, t0: f64, t1: f64) -> Option<f64> {
        let s = self.std_of(name)?;
        let (a, b) = (
            (t0 / self.dt).round() as usize,
            ((t1 / self.dt).round() as usize).min(s.len() - 1),
        );
        if a > b {
            return None;
        }
        let var: f64 = s[a..=b].iter().map(|x| x * x).sum::<f64>() / (b - a + 1) as f64;
        Some(var.sqrt())
    }
}

/// Running sums, offset by the first accepted run to limit cancellation.
#[derive(Clone, Debug)]
pub struct BatchAccumulator {
    names: &'static [&'static str],
    dt: f64,
    requested: usize,
    shift: Vec<Vec<f64>>,
    s1: Vec<Vec<f64>>,
    s2: Vec<Vec<f64>>,
    count: usize,
    failures: Vec<(u64, RunFailure)>,
}

impl BatchAccumulator {
    pub fn new(names: &'static [&'static str], dt: f64) -> Self {
        Self {
            names,
            dt,
            requested: 0,
            shift: Vec::new(),
            s1: Vec::new(),
            s2: Vec::new(),
            count: 0,
            failures: Vec::new(),
        }
    }

    pub fn add(&mut self, run: &RunResult) {
        self.requested += 1;
        if let Some(f) = &run.failure {
            self.failures.push((run.seed, f.clone()));
            return;
        }
        if self.count == 0 {
            self.shift = run.series.clone();
            self.s1 = run.series.iter().map(|s| vec![0.0; s.len()]).collect();
            self.s2 = self.s1.clone();
        } else {
            for c in 0..run.series.len() {
                let (sh, a, b) = (&self.shift[c], &mut self.s1[c], &mut self.s2[c]);
                for (k, x) in run.series[c].iter().enumerate() {
                    let y = x - sh[k];
                    a[k] += y;
                    b[k] += y * y;
                }
            }
        }
        self.count += 1;
    }

    pub fn finish(self) -> Result<BatchStats, Error> {
        if self.count < 2 {
            return Err(Error::TooFewRuns {
                succeeded: self.count,
                required: 2,
            });
        }
        let n = self.count as f64;
        let mut mean = Vec::with_capacity(self.shift.len());
        let mut std = Vec::with_capacity(self.shift.len());
        for c in 0..self.shift.len() {
            let (sh, a, b) = (&self.shift[c], &self.s1[c], &self.s2[c]);
            mean.push(sh.iter().zip(a).map(|(s, a)| s + a / n).collect());
            std.push(
                a.iter()
                    .zip(b)
                    .map(|(a, b)| ((b - a * a / n) / (n - 1.0)).max(0.0).sqrt())
                    .collect(),
            );
        }
        Ok(BatchStats {
            names: self.names,
            dt: self.dt,
            requested: self.requested,
            succeeded: self.count,
            failures: self.failures,
            mean,
            std,
        })
    }
}

pub fn monte_carlo(
    scenario: &Scenario,
    n_runs: usize,
    base_seed: u64,
) -> Result<BatchStats, Error> {
    monte_carlo_keep(scenario, n_runs, base_seed, 0).map(|(s, _)| s)
}

/// Runs seeds `base_seed + i` for `i < n_runs` and also returns the first
/// `keep` runs in full. Runs execute in parallel in fixed-size chunks and are
/// accumulated in seed order, so the result does not depend on scheduling.
pub fn monte_carlo_keep(
    scenario: &Scenario,
    n_runs: usize,
    base_seed: u64,
    keep: usize,
) -> Result<(BatchStats, Vec<RunResult>), Error> {
    if n_runs < 2 {
        return Err(Error::InvalidScenario(format!(
            "a batch needs at least 2 runs, got {n_runs}"
        )));
    }
    let prepared = scenario.prepare()?;
    let names = if scenario.is_two_robot() {
        super::run::CHANNELS_2R
    } else {
        super::run::CHANNELS_3R
    };
    let mut acc = BatchAccumulator::new(names, scenario.dt);
    let mut kept = Vec::new();
    let chunk = rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < n_runs {
        let end = (start + chunk).min(n_runs);
        let runs: Vec<Result<RunResult, Error>> = (start..end)
            .into_par_iter()
            .map(|i| simulate_prepared(&prepared, base_seed.wrapping_add(i as u64)))
            .collect();
        for (i, r) in (start..end).zip(runs) {
            let r = r?;
            acc.add(&r);
            if i < keep {
                kept.push(r);
            }
        }
        start = end;
    }
    Ok((acc.finish()?, kept))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(seed: u64, series: Vec<Vec<f64>>) -> RunResult {
        RunResult {
            seed,
            dt: 1.0,
            names: &["a"],
            series,
            failure: None,
        }
    }

    #[test]
    fn identical_runs_have_zero_std() {
        let mut acc = BatchAccumulator::new(&["a"], 1.0);
        let r = run(0, vec![vec![1.0, 2.0, 3.0]]);
        acc.add(&r);
        acc.add(&r);
        let s = acc.finish().unwrap();
        assert_eq!(s.std[0], vec![0.0, 0.0, 0.0]);
        assert_eq!(s.mean[0], vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn unbiased_std() {
        let mut acc = BatchAccumulator::new(&["a"], 1.0);
        for (i, x) in [1e6 + 1.0, 1e6 + 2.0, 1e6 + 3.0, 1e6 + 4.0]
            .iter()
            .enumerate()
        {
            acc.add(&run(i as u64, vec![vec![*x]]));
        }
        let s = acc.finish().unwrap();
        assert!((s.mean[0][0] - (1e6 + 2.5)).abs() < 1e-9);
        assert!((s.std[0][0] - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn failures_excluded_and_counted() {
        let mut acc = BatchAccumulator::new(&["a"], 1.0);
        acc.add(&run(0, vec![vec![1.0]]));
        let mut bad = run(1, vec![vec![]]);
        bad.failure = Some(RunFailure {
            time: 0.5,
            reason: "collinear".into(),
        });
        acc.add(&bad);
        acc.add(&run(2, vec![vec![3.0]]));
        let s = acc.finish().unwrap();
        assert_eq!((s.requested, s.succeeded, s.failures.len()), (3, 2, 1));
        assert_eq!(s.mean[0][0], 2.0);
    }

    #[test]
    fn single_run_is_rejected() {
        let mut acc = BatchAccumulator::new(&["a"], 1.0);
        acc.add(&run(0, vec![vec![1.0]]));
        assert!(matches!(acc.finish(), Err(Error::TooFewRuns { .. })));
    }
}
