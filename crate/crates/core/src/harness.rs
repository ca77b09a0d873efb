//! Replicated runs and parameter sweeps.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use crate::config::{is_sweepable, ScenarioConfig};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, Aggregates, SnapshotRecord};
use crate::scheduler::run_simulation;

#[derive(Debug, Clone)]
pub struct Replications {
    pub config: ScenarioConfig,
    pub n_runs: u32,
    pub master_seed: u64,
    /// All runs' snapshots, ordered by run, cycle, level.
    pub snapshots: Vec<SnapshotRecord>,
    pub aggregates: Aggregates,
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_string())
}

/// Runs `0..n_runs` on a pool of `parallelism` threads. Run `k` always uses
/// the stream for `(master_seed, k)`, so the output is independent of the
/// pool size and of completion order.
pub fn run_replications(config: &ScenarioConfig, n_runs: u32, master_seed: u64, parallelism: usize) -> Result<Replications> {
    config.validate()?;
    if n_runs == 0 {
        return Err(Error::invalid("run.n_runs", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Runtime(format!("could not start worker pool: {e}")))?;

    let per_run: Vec<Result<Vec<SnapshotRecord>>> = pool.install(|| {
        (0..u64::from(n_runs))
            .into_par_iter()
            .map(|run_index| {
                catch_unwind(AssertUnwindSafe(|| run_simulation(config, master_seed, run_index)))
                    .map_err(|p| Error::RunPanicked {
                        run_index,
                        master_seed,
                        message: panic_message(p),
                    })?
                    .map(|r| r.snapshots)
            })
            .collect()
    });

    let mut snapshots = Vec::new();
    for run in per_run {
        snapshots.extend(run?);
    }
    let aggregates = aggregate(&snapshots);
    Ok(Replications {
        config: config.clone(),
        n_runs,
        master_seed,
        snapshots,
        aggregates,
    })
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub key: String,
    /// The value as given on the command line.
    pub value: String,
    pub config: ScenarioConfig,
}

impl SweepCell {
    /// Directory-safe label, e.g. `norms.w=0.4`.
    pub fn label(&self) -> String {
        format!("{}={}", self.key, self.value)
    }
}

/// One validated config per value of `key`.
pub fn sweep_cells(base: &ScenarioConfig, key: &str, values: &[String]) -> Result<Vec<SweepCell>> {
    if !is_sweepable(key) {
        return Err(if base.get(key).is_none() {
            Error::UnknownKey(key.to_string())
        } else {
            Error::NotSweepable(key.to_string())
        });
    }
    if values.is_empty() {
        return Err(Error::invalid(key, "no sweep values given"));
    }
    values
        .iter()
        .map(|value| {
            let mut config = base.clone();
            config.set_from_str(key, value)?;
            config.validate()?;
            Ok(SweepCell {
                key: key.to_string(),
                value: value.trim().to_string(),
                config,
            })
        })
        .collect()
}

/// Replicates every sweep cell with the same seed.
pub fn sweep(
    base: &ScenarioConfig,
    key: &str,
    values: &[String],
    n_runs: u32,
    master_seed: u64,
    parallelism: usize,
) -> Result<Vec<(SweepCell, Replications)>> {
    sweep_cells(base, key, values)?
        .into_iter()
        .map(|cell| {
            let reps = run_replications(&cell.config, n_runs, master_seed, parallelism)?;
            Ok((cell, reps))
        })
        .collect()
}
