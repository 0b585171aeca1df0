use serde::Serialize;

use crate::discretization::BoundaryKind;
use crate::error::{Error, Result};
use crate::problems::{make_problem, Problem, ProblemKind};
use crate::stepper::{integrate, State};

use super::config::Scheme;
use super::run::build_stepper;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillationMetrics {
    pub t: f64,
    pub step: usize,
    pub min: f64,
    pub max: f64,
    /// Largest `|u[i-1] - 2u[i] + u[i+1]|` along the middle grid row,
    /// boundary nodes included.
    pub midline_second_difference: f64,
}

impl OscillationMetrics {
    /// Metrics of the first species over the full grid. Dirichlet boundary
    /// nodes carry zero.
    pub fn measure(state: &State, step: usize, points_per_side: usize, bc: BoundaryKind) -> Self {
        let p = points_per_side;
        let field = &state.u[..p * p];
        let mut row: Vec<f64> = field[(p / 2) * p..(p / 2 + 1) * p].to_vec();
        let mut bounds = field.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        if bc == BoundaryKind::HomogeneousDirichlet {
            row.insert(0, 0.0);
            row.push(0.0);
            bounds = (bounds.0.min(0.0), bounds.1.max(0.0));
        }
        let (min, max) = bounds;
        let midline_second_difference = row
            .windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs())
            .fold(0.0, f64::max);
        Self {
            t: state.t,
            step,
            min,
            max,
            midline_second_difference,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeDamping {
    pub scheme: Scheme,
    /// One entry per step, starting after the first.
    pub history: Vec<OscillationMetrics>,
    pub failure: Option<String>,
}

impl SchemeDamping {
    pub fn after_first_step(&self) -> Option<&OscillationMetrics> {
        self.history.first()
    }

    pub fn at_final(&self) -> Option<&OscillationMetrics> {
        self.history.last()
    }

    pub fn min_over_run(&self) -> f64 {
        self.history.iter().map(|m| m.min).fold(f64::INFINITY, f64::min)
    }

    pub fn max_over_run(&self) -> f64 {
        self.history.iter().map(|m| m.max).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DampingReport {
    pub problem: ProblemKind,
    pub m: usize,
    pub h: f64,
    pub k: f64,
    pub t_final: f64,
    pub initial_max: f64,
    pub schemes: Vec<SchemeDamping>,
}

impl DampingReport {
    pub fn scheme(&self, scheme: Scheme) -> Option<&SchemeDamping> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }

    /// First-step midline oscillation of the Padé variant relative to the RDP scheme.
    pub fn first_step_ratio(&self) -> Option<f64> {
        let rdp = self.scheme(Scheme::Rdp)?.after_first_step()?;
        let p22 = self.scheme(Scheme::P22)?.after_first_step()?;
        Some(p22.midline_second_difference / rdp.midline_second_difference)
    }
}

fn track(problem: &Problem, scheme: Scheme, k: f64, t_final: f64) -> Result<SchemeDamping> {
    let (p, bc) = (problem.points_per_side(), problem.spec.bc);
    let mut history = Vec::new();
    let outcome = build_stepper(problem, scheme, k, 1).and_then(|stepper| {
        integrate(stepper.as_ref(), problem.initial_state(), t_final, problem, |i, s| {
            if i > 0 {
                history.push(OscillationMetrics::measure(s, i, p, bc));
            }
        })
    });
    let failure = match outcome {
        Ok(_) => None,
        Err(e @ (Error::Divergence { .. } | Error::Setup { .. })) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(SchemeDamping {
        scheme,
        history,
        failure,
    })
}

/// Mismatched-data run to `T = 1` with both rational schemes.
pub fn run_damping_demo(m: usize, k: f64) -> Result<DampingReport> {
    run_damping_demo_until(m, k, 1.0)
}

pub fn run_damping_demo_until(m: usize, k: f64, t_final: f64) -> Result<DampingReport> {
    let problem = make_problem(ProblemKind::MichaelisMenten.name(), m)?;
    let initial_max = problem
        .initial_on_grid()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let schemes = [Scheme::Rdp, Scheme::P22]
        .into_iter()
        .map(|s| track(&problem, s, k, t_final))
        .collect::<Result<_>>()?;
    Ok(DampingReport {
        problem: problem.kind(),
        m: problem.grid.m(),
        h: problem.grid.h(),
        k,
        t_final,
        initial_max,
        schemes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_on_known_grid() {
        // 3x3 grid, middle row [1, 5, 2]
        let s = State::new(vec![0.5, 0.5, 0.5, 1.0, 5.0, 2.0, 0.5, 0.5, 0.5], 0.0);
        let m = OscillationMetrics::measure(&s, 0, 3, BoundaryKind::HomogeneousNeumann);
        assert_eq!((m.min, m.max), (0.5, 5.0));
        assert_eq!(m.midline_second_difference, 7.0);
        // zero boundary values extend the row to [0, 1, 5, 2, 0]
        let m = OscillationMetrics::measure(&s, 0, 3, BoundaryKind::HomogeneousDirichlet);
        assert_eq!((m.min, m.max), (0.0, 5.0));
        assert_eq!(m.midline_second_difference, 7.0);
        let edge = State::new(vec![0.0, 0.0, 0.0, 3.0, 3.0, 3.0, 0.0, 0.0, 0.0], 0.0);
        let m = OscillationMetrics::measure(&edge, 0, 3, BoundaryKind::HomogeneousDirichlet);
        assert_eq!(m.midline_second_difference, 3.0);
    }

    #[test]
    fn small_demo_runs() {
        let r = run_damping_demo_until(9, 0.25, 0.5).unwrap();
        assert_eq!(r.schemes.len(), 2);
        assert_eq!(r.scheme(Scheme::Rdp).unwrap().history.len(), 2);
        assert!(r.first_step_ratio().unwrap() > 1.0);
    }
}
