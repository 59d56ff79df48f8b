//! Parallel execution helpers: seed sweeps and size sweeps.
//!
//! Each run is still single-threaded and deterministic; parallelism only
//! spreads independent runs across cores, and results come back in input
//! order, so batch output is as reproducible as a lone run.

use blocklace_metrics::{fit_loglog, Fit};
use rayon::prelude::*;
use serde::Serialize;

use crate::scenario::{Scenario, ScenarioError};
use crate::sim::{run, RunResult};

/// Run one scenario under many seeds in parallel, in seed order.
pub fn run_seeds(base: &Scenario, seeds: &[u64]) -> Result<Vec<RunResult>, ScenarioError> {
    base.validate()?;
    Ok(seeds
        .par_iter()
        .map(|&seed| {
            let mut scenario = base.clone();
            scenario.seed = seed;
            run(&scenario).expect("validated scenario runs")
        })
        .collect())
}

/// Mean per-payment costs at one network size.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub n: u32,
    pub runs: usize,
    pub msgs_per_payment: f64,
    pub bytes_per_payment: f64,
    pub payments_finalized: u64,
    /// Every run at this size ended in a passing verdict.
    pub all_ok: bool,
}

/// A size sweep with log-log fits of per-payment cost against n.
#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub msgs_fit: Option<Fit>,
    pub bytes_fit: Option<Fit>,
}

impl Sweep {
    pub fn all_ok(&self) -> bool {
        self.points.iter().all(|p| p.all_ok)
    }
}

/// Rerun `base` at each network size, averaging per-payment costs over
/// `seeds`, and fit how they scale. Sizes that cannot host the scenario's
/// scripted agents are an error, not a skip.
pub fn sweep(base: &Scenario, sizes: &[u32], seeds: &[u64]) -> Result<Sweep, ScenarioError> {
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let scaled = base.with_n(n)?;
        let results = run_seeds(&scaled, seeds)?;
        let runs = results.len().max(1);
        let mean = |f: fn(&RunResult) -> f64| -> f64 {
            results.iter().map(f).sum::<f64>() / runs as f64
        };
        points.push(SweepPoint {
            n,
            runs: results.len(),
            msgs_per_payment: mean(|r| r.report.msgs_per_payment),
            bytes_per_payment: mean(|r| r.report.bytes_per_payment),
            payments_finalized: results.iter().map(|r| r.report.payments_finalized).sum(),
            all_ok: results.iter().all(|r| r.verdict.exit_ok()),
        });
    }
    let series = |pick: fn(&SweepPoint) -> f64| -> Vec<(f64, f64)> {
        points.iter().map(|p| (p.n as f64, pick(p))).collect()
    };
    Ok(Sweep {
        msgs_fit: fit_loglog(&series(|p| p.msgs_per_payment)),
        bytes_fit: fit_loglog(&series(|p| p.bytes_per_payment)),
        points,
    })
}
