use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::ProblemKind;
use crate::stepper::{integrate, StepperWorkspace};

use super::config::RunConfig;
use super::metrics::linf_error;

#[derive(Clone, Debug, Serialize)]
pub struct BenchEntry {
    pub workers: usize,
    pub step_seconds: f64,
    /// Serial stepping time over this entry's stepping time.
    pub speedup: f64,
    /// Largest difference from the first entry's final state.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub problem: ProblemKind,
    pub m: usize,
    pub unknowns: usize,
    pub k: f64,
    pub t_final: f64,
    pub steps: usize,
    /// Stored entries in the eight triangular factors.
    pub factor_entries: usize,
    /// Factorization time, paid once for all worker counts.
    pub setup_seconds: f64,
    pub available_parallelism: usize,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    pub fn speedup(&self, workers: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.workers == workers).map(|e| e.speedup)
    }
}

/// Times the stepping loop of the RDP scheme for each worker count.
///
/// Speedups are relative to the first entry, so list `1` first.
pub fn bench(cfg: &RunConfig, workers: &[usize]) -> Result<BenchReport> {
    cfg.validate()?;
    if workers.is_empty() || workers.contains(&0) {
        return Err(Error::InvalidArgument("worker counts must be positive".into()));
    }
    let problem = cfg.build_problem()?;
    let s0 = problem.initial_state();
    let clock = Instant::now();
    let mut ws = StepperWorkspace::setup_with_workers(&problem.matrix, cfg.k, workers[0])?;
    let setup_seconds = clock.elapsed().as_secs_f64();
    let factor_entries = ws
        .half_factors()
        .iter()
        .chain(ws.full_factors())
        .map(|f| f.fill())
        .sum();

    let mut entries: Vec<BenchEntry> = Vec::new();
    let mut reference: Option<Vec<f64>> = None;
    let mut steps = 0;
    for &w in workers {
        ws.set_workers(w)?;
        let clock = Instant::now();
        let end = integrate(&ws, s0.clone(), cfg.t_final, &problem, |_, _| {})?;
        let step_seconds = clock.elapsed().as_secs_f64();
        steps = end.steps;

        let deviation = match &reference {
            Some(r) => linf_error(r, &end.u)?,
            None => {
                reference = Some(end.u);
                0.0
            }
        };
        let serial = entries.first().map_or(step_seconds, |e| e.step_seconds);
        entries.push(BenchEntry {
            workers: w,
            step_seconds,
            speedup: serial / step_seconds,
            deviation,
        });
    }
    Ok(BenchReport {
        problem: problem.kind(),
        m: problem.grid.m(),
        unknowns: problem.n_unknowns(),
        k: cfg.k,
        t_final: cfg.t_final,
        steps,
        factor_entries,
        setup_seconds,
        available_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        entries,
    })
}
