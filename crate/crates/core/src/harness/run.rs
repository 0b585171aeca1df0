use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::{Problem, ProblemKind};
use crate::reference::{DenseEtdrk4, P22Workspace};
use crate::stepper::{integrate, step_count, State, StepperWorkspace, TimeStepper};

use super::config::{RunConfig, Scheme};
use super::metrics::linf_error;

/// Dense reference steppers are limited to this many unknowns.
pub const EXACT_REF_MAX_UNKNOWNS: usize = 2500;

pub fn build_stepper(problem: &Problem, scheme: Scheme, k: f64, workers: usize) -> Result<Box<dyn TimeStepper>> {
    Ok(match scheme {
        Scheme::Rdp => Box::new(StepperWorkspace::setup_with_workers(&problem.matrix, k, workers)?),
        Scheme::P22 => Box::new(P22Workspace::setup(&problem.matrix, k)?),
        Scheme::ExactRef => {
            let n = problem.n_unknowns();
            if n > EXACT_REF_MAX_UNKNOWNS {
                return Err(Error::InvalidArgument(format!(
                    "exact-ref is dense; {n} unknowns exceeds {EXACT_REF_MAX_UNKNOWNS}"
                )));
            }
            Box::new(DenseEtdrk4::exact(&problem.matrix, k)?)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub problem: ProblemKind,
    pub scheme: Scheme,
    pub m: usize,
    pub h: f64,
    pub k: f64,
    pub t_final: f64,
    pub workers: usize,
    /// Unknowns per direction, per species.
    pub points_per_side: usize,
    pub species: usize,
    #[serde(skip)]
    pub final_state: State,
    pub error: Option<f64>,
    pub setup_seconds: f64,
    pub step_seconds: f64,
    pub snapshots: Vec<Snapshot>,
}

/// Runs one configuration on an already built problem.
pub fn solve_problem(problem: &Problem, cfg: &RunConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let steps = step_count(cfg.t_final, cfg.k)?;
    let mut wanted: Vec<usize> = cfg
        .snapshot_at
        .iter()
        .map(|t| ((t / cfg.k).round() as usize).min(steps))
        .collect();
    wanted.sort_unstable();
    wanted.dedup();

    let clock = Instant::now();
    let stepper = build_stepper(problem, cfg.scheme, cfg.k, cfg.workers)?;
    let setup_seconds = clock.elapsed().as_secs_f64();

    let mut snapshots = Vec::new();
    let clock = Instant::now();
    let end = integrate(
        stepper.as_ref(),
        problem.initial_state(),
        cfg.t_final,
        problem,
        |i, s| {
            if wanted.binary_search(&i).is_ok() {
                snapshots.push(Snapshot {
                    t: s.t,
                    step: i,
                    u: s.u.clone(),
                });
            }
        },
    )?;
    let step_seconds = clock.elapsed().as_secs_f64();

    let error = match problem.exact_on_grid(cfg.t_final) {
        Ok(exact) => Some(linf_error(&end.u, &exact)?),
        Err(Error::NoExactSolution(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SolveOutcome {
        problem: problem.kind(),
        scheme: cfg.scheme,
        m: problem.grid.m(),
        h: problem.grid.h(),
        k: cfg.k,
        t_final: cfg.t_final,
        workers: cfg.workers,
        points_per_side: problem.points_per_side(),
        species: problem.spec.species(),
        final_state: end,
        error,
        setup_seconds,
        step_seconds,
        snapshots,
    })
}

pub fn solve(cfg: &RunConfig) -> Result<SolveOutcome> {
    solve_problem(&cfg.build_problem()?, cfg)
}
