// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Trajectory-parallel ensembles with a fixed-order reduction.
//!
//! Trajectories are evolved in blocks on a worker pool and folded into the
//! accumulator in index order, so the curve is bitwise identical for any
//! worker count.

use anyhow::Context;
use detune_core::experiment::EnsembleAccumulator;
use detune_core::{DecayCurve, ExperimentConfig, Simulation};
use rayon::prelude::*;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "DETUNE_WORKERS";

/// Trajectories per worker held in memory before reduction.
const BLOCK_PER_WORKER: usize = 64;

/// `requested`, else `DETUNE_WORKERS`, else the available parallelism.
pub fn resolve_workers(requested: Option<usize>) -> anyhow::Result<usize> {
    if let Some(n) = requested {
        anyhow::ensure!(n > 0, "worker count must be at least 1");
        return Ok(n);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}=`{v}` is not a worker count"))?;
        anyhow::ensure!(n > 0, "{WORKERS_ENV} must be at least 1");
        return Ok(n);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the ensemble of an already built simulation on `workers` threads.
pub fn run_simulation(sim: &Simulation, workers: usize) -> anyhow::Result<DecayCurve> {
    let n_traj = sim.config().n_traj as u64;
    if workers <= 1 {
        return Ok(sim.run_serial());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().context("cannot start worker pool")?;
    let block = (workers * BLOCK_PER_WORKER) as u64;
    let mut acc = EnsembleAccumulator::new(sim.times().len());
    pool.install(|| {
        let mut start = 0;
        while start < n_traj {
            let end = (start + block).min(n_traj);
            let series: Vec<Vec<f64>> = (start..end).into_par_iter().map(|i| sim.trajectory(i)).collect();
            for s in &series {
                acc.push(s);
            }
            start = end;
        }
    });
    Ok(acc.finish(sim.times()))
}

pub fn run_parallel(cfg: &ExperimentConfig, workers: usize) -> anyhow::Result<DecayCurve> {
    let sim = Simulation::new(*cfg)?;
    run_simulation(&sim, workers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use detune_core::{SchemeKind, SchemeSpec};

    #[test]
    fn worker_count_does_not_change_the_bits() {
        let mut cfg = ExperimentConfig::new(SchemeSpec::new(SchemeKind::Single)).with_duration(20.0, 40);
        cfg.n_traj = 300;
        let serial = run_parallel(&cfg, 1).unwrap();
        for w in [2, 3, 8] {
            assert_eq!(run_parallel(&cfg, w).unwrap(), serial, "{w} workers");
        }
    }

    #[test]
    fn explicit_count_wins() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
        assert!(resolve_workers(Some(0)).is_err());
    }
}
