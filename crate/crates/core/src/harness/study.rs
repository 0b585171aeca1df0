use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::{make_problem, make_problem_near_h, Problem, ProblemKind};

use super::config::{RunConfig, Scheme};
use super::metrics::{linf_error, observed_order};
use super::run::solve_problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Errors against the exact solution, refining `k` and `h` together.
    Exact,
    /// Differences between successive `k` halvings on one grid.
    SelfConvergence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: f64,
    /// Actual spacing.
    pub h: f64,
    pub h_nominal: Option<f64>,
    pub m: usize,
    pub error: Option<f64>,
    pub order: Option<f64>,
    pub wall_seconds: f64,
    pub setup_seconds: f64,
    /// Set when the run at this level failed.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub study: StudyKind,
    pub problem: ProblemKind,
    pub scheme: Scheme,
    pub t_final: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn empty(study: StudyKind, cfg: &RunConfig) -> Self {
        Self {
            study,
            problem: cfg.problem,
            scheme: cfg.scheme,
            t_final: cfg.t_final,
            rows: Vec::new(),
        }
    }

    pub fn errors(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn orders(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.order).collect()
    }

    fn fill_orders(&mut self) {
        for i in 1..self.rows.len() {
            let halved = (self.rows[i].k * 2.0 - self.rows[i - 1].k).abs() <= 1e-12 * self.rows[i - 1].k;
            self.rows[i].order = match (halved, self.rows[i - 1].error, self.rows[i].error) {
                (true, Some(c), Some(f)) => observed_order(c, f),
                _ => None,
            };
        }
    }
}

fn level_problem(base: &RunConfig, level: u32) -> Result<(Problem, Option<f64>)> {
    let scale = 0.5f64.powi(level as i32);
    match (base.m, base.h) {
        (Some(m), _) => Ok((make_problem(base.problem.name(), (m + 1) * (1 << level) - 1)?, None)),
        (None, h) => {
            let h = h.unwrap_or(base.problem.defaults().1) * scale;
            Ok((make_problem_near_h(base.problem.name(), h)?, Some(h)))
        }
    }
}

/// Refines `k` and `h` together and measures errors against the exact solution.
///
/// With `m` set each level exactly halves the spacing; otherwise the nominal
/// `h` is halved and mapped to the nearest grid.
pub fn run_convergence(base: &RunConfig, levels: usize) -> Result<ConvergenceReport> {
    base.validate()?;
    if base.build_problem()?.spec.exact.is_none() {
        return Err(Error::NoExactSolution(base.problem.name().into()));
    }
    let mut report = ConvergenceReport::empty(StudyKind::Exact, base);
    for level in 0..levels as u32 {
        let (problem, h_nominal) = level_problem(base, level)?;
        let mut cfg = base.clone();
        cfg.k = base.k * 0.5f64.powi(level as i32);
        cfg.snapshot_at.clear();
        let clock = Instant::now();
        let mut row = ConvergenceRow {
            k: cfg.k,
            h: problem.grid.h(),
            h_nominal,
            m: problem.grid.m(),
            error: None,
            order: None,
            wall_seconds: 0.0,
            setup_seconds: 0.0,
            failure: None,
        };
        match solve_problem(&problem, &cfg) {
            Ok(out) => {
                row.error = out.error;
                row.wall_seconds = out.step_seconds;
                row.setup_seconds = out.setup_seconds;
            }
            Err(e @ (Error::Divergence { .. } | Error::Setup { .. })) => {
                row.wall_seconds = clock.elapsed().as_secs_f64();
                row.failure = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        report.rows.push(row);
    }
    report.fill_orders();
    Ok(report)
}

/// Halves `k` on a fixed grid; row `i` compares the runs at `kᵢ` and `kᵢ/2`.
///
/// `levels` is the number of rows, so `levels + 1` runs are made.
pub fn run_self_convergence(base: &RunConfig, levels: usize) -> Result<ConvergenceReport> {
    base.validate()?;
    let problem = base.build_problem()?;
    let mut report = ConvergenceReport::empty(StudyKind::SelfConvergence, base);
    let mut runs = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let mut cfg = base.clone();
        cfg.k = base.k * 0.5f64.powi(level as i32);
        cfg.snapshot_at.clear();
        let clock = Instant::now();
        runs.push(match solve_problem(&problem, &cfg) {
            Ok(out) => (cfg.k, Ok(out.final_state.u), out.step_seconds, out.setup_seconds),
            Err(e @ (Error::Divergence { .. } | Error::Setup { .. })) => {
                (cfg.k, Err(e.to_string()), clock.elapsed().as_secs_f64(), 0.0)
            }
            Err(e) => return Err(e),
        });
    }
    for i in 0..levels {
        let (k, coarse, wall, setup) = &runs[i];
        let fine = &runs[i + 1].1;
        let (error, failure) = match (coarse, fine) {
            (Ok(c), Ok(f)) => (Some(linf_error(c, f)?), None),
            (Err(e), _) | (_, Err(e)) => (None, Some(e.clone())),
        };
        report.rows.push(ConvergenceRow {
            k: *k,
            h: problem.grid.h(),
            h_nominal: base.m.is_none().then_some(base.h).flatten(),
            m: problem.grid.m(),
            error,
            order: None,
            wall_seconds: *wall,
            setup_seconds: *setup,
            failure,
        });
    }
    report.fill_orders();
    Ok(report)
}
