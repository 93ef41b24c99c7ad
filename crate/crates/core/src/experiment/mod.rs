//! Replicated, seeded experiments.
//!
//! Run `r` of an experiment is seeded with [`mix`]`(master_seed, r)`, so each
//! run is reproducible on its own and runs may execute in any order or
//! concurrently. Aggregation folds the runs in run-id order.

mod config;
mod output;
mod studies;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{parse_config, read_config};
pub use output::{format_number, AGGREGATE_CSV, FINAL_STATE_CSV};
pub use studies::{
    compare_models, sweep, validate_predictions, ComparisonRow, SweepParameter, SweepRow,
    ValidationPoint, ValidationReport, ValidationRow,
};

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::game::{GameConfig, Simulation};
use crate::seed::mix;
use crate::stats::Moments;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    pub env: Environment,
    pub runs: usize,
    pub master_seed: u64,
    pub record_every: usize,
    /// Directory for CSV output; nothing is written when `None`.
    pub outputs: Option<PathBuf>,
    /// Concurrent runs; `None` uses every available core.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            game: GameConfig::default(),
            env: Environment::uniform_box((0.0, 1.0), (0.0, 0.5)).expect("valid default box"),
            runs: 25,
            master_seed: 0,
            record_every: 1,
            outputs: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if self.record_every == 0 || self.record_every > self.game.timesteps {
            return Err(Error::invalid(format!(
                "record_every must lie in [1, timesteps = {}], got {}",
                self.game.timesteps, self.record_every
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Environment::new(self.env.x1, self.env.x2, self.game.labels.bounds())?;
        Ok(())
    }

    /// Timesteps at which population statistics are recorded, starting at 0.
    pub fn recorded_timesteps(&self) -> Vec<usize> {
        let t = self.game.timesteps;
        let mut steps: Vec<usize> = (0..=t).step_by(self.record_every).collect();
        if steps.last() != Some(&t) {
            steps.push(t);
        }
        steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub timestep: usize,
    pub mean_lambda: f64,
    /// Cross-agent sample SD (`n-1` denominator).
    pub sd_lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub series: Vec<SeriesPoint>,
    pub final_lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregatePoint {
    pub timestep: usize,
    pub mean_of_means: f64,
    pub sem_of_means: f64,
    pub mean_sd: f64,
    /// Mean over runs of the cross-agent variance.
    pub mean_var: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub runs: usize,
    pub series: Vec<AggregatePoint>,
}

impl AggregateRecord {
    /// Folds run records in the order given.
    pub fn from_runs(records: &[RunRecord]) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::invalid("cannot aggregate zero runs"))?;
        let len = first.series.len();
        if records.iter().any(|r| r.series.len() != len) {
            return Err(Error::invalid("run series have different lengths"));
        }
        let series = (0..len)
            .map(|k| {
                let means: Moments = records.iter().map(|r| r.series[k].mean_lambda).collect();
                let sds: Moments = records.iter().map(|r| r.series[k].sd_lambda).collect();
                let vars: Moments = records
                    .iter()
                    .map(|r| r.series[k].sd_lambda * r.series[k].sd_lambda)
                    .collect();
                AggregatePoint {
                    timestep: first.series[k].timestep,
                    mean_of_means: means.mean(),
                    sem_of_means: means.sem(),
                    mean_sd: sds.mean(),
                    mean_var: vars.mean(),
                }
            })
            .collect();
        Ok(Self {
            runs: records.len(),
            series,
        })
    }

    pub fn last(&self) -> &AggregatePoint {
        self.series
            .last()
            .expect("aggregate series always includes t = 0")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<RunRecord>,
    pub aggregate: AggregateRecord,
}

fn snapshot(sim: &Simulation) -> SeriesPoint {
    let m: Moments = sim.lambdas().collect();
    SeriesPoint {
        timestep: sim.timestep(),
        mean_lambda: m.mean(),
        sd_lambda: m.sample_sd(),
    }
}

/// Plays run `run_id` of `cfg` to completion.
pub fn run_single(cfg: &ExperimentConfig, run_id: usize) -> Result<RunRecord> {
    let mut sim = Simulation::new(
        cfg.game.clone(),
        cfg.env,
        mix(cfg.master_seed, run_id as u64),
    )?;
    let total = cfg.game.timesteps;
    let mut series = Vec::with_capacity(total / cfg.record_every + 2);
    series.push(snapshot(&sim));
    for t in 1..=total {
        sim.step()?;
        if t % cfg.record_every == 0 || t == total {
            series.push(snapshot(&sim));
        }
    }
    Ok(RunRecord {
        run_id,
        series,
        final_lambdas: sim.lambdas().collect(),
    })
}

/// Creates `dir` and checks it is writable.
fn prepare_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".lexweight-write-probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(())
}

/// Runs `f` on a pool of `workers` threads, or the global pool.
pub(crate) fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every replicate, aggregates, and persists when `cfg.outputs` is set.
///
/// An unwritable output directory is reported before any simulation starts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    if let Some(dir) = &cfg.outputs {
        prepare_output_dir(dir)?;
    }
    let runs = with_workers(cfg.workers, || {
        (0..cfg.runs)
            .into_par_iter()
            .map(|r| run_single(cfg, r))
            .collect::<Result<Vec<_>>>()
    })??;
    let aggregate = AggregateRecord::from_runs(&runs)?;
    let result = ExperimentResult { runs, aggregate };
    if let Some(dir) = &cfg.outputs {
        output::write_all(dir, &result)?;
    }
    Ok(result)
}
