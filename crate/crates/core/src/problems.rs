//! Built-in test problems on square domains.
//!
//! | name               | domain      | boundary  | reaction                     | exact |
//! |--------------------|-------------|-----------|------------------------------|-------|
//! | `dirichlet-linear` | (-π/2, π/2)² | Dirichlet | `-u`                        | yes   |
//! | `neumann-linear`   | (-π, π)²    | Neumann   | `-u`                         | yes   |
//! | `michaelis-menten` | (0, 1)²     | Dirichlet | `-u/(1+u)`                   | no    |
//! | `brusselator`      | (0, 1)²     | Neumann   | `A + u²v - (B+1)u, Bu - u²v` | no    |
//!
//! The Michaelis–Menten initial value `u₀ = 1` does not vanish on the
//! boundary, so the solution has a layer there.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::discretization::{assemble_system_matrix, BoundaryKind, Grid1D};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::stepper::{Reaction, State};

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    DirichletLinear,
    NeumannLinear,
    MichaelisMenten,
    Brusselator,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::DirichletLinear,
        ProblemKind::NeumannLinear,
        ProblemKind::MichaelisMenten,
        ProblemKind::Brusselator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::DirichletLinear => "dirichlet-linear",
            ProblemKind::NeumannLinear => "neumann-linear",
            ProblemKind::MichaelisMenten => "michaelis-menten",
            ProblemKind::Brusselator => "brusselator",
        }
    }

    /// Conventional `(k, h, T)` for a first run or the coarsest study level.
    pub fn defaults(self) -> (f64, f64, f64) {
        match self {
            ProblemKind::DirichletLinear => (0.1, 0.08, 1.0),
            ProblemKind::NeumannLinear => (0.1, 0.16, 1.0),
            ProblemKind::MichaelisMenten => (0.1, 0.05, 1.0),
            ProblemKind::Brusselator => (0.05, 0.0125, 2.0),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

pub type ReactionFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
/// `(x, y) ↦ one value per species`.
pub type InitialFn = Arc<dyn Fn(f64, f64) -> Vec<f64> + Send + Sync>;
/// `(x, y, t) ↦ one value per species`.
pub type ExactFn = Arc<dyn Fn(f64, f64, f64) -> Vec<f64> + Send + Sync>;

/// Problem definition independent of the mesh.
#[derive(Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub domain: (f64, f64),
    pub bc: BoundaryKind,
    pub diffusion: Vec<f64>,
    /// Acts on a species-major vector of all unknowns.
    pub reaction: ReactionFn,
    pub initial: InitialFn,
    pub exact: Option<ExactFn>,
    /// Initial data incompatible with the boundary condition.
    pub mismatched: bool,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("bc", &self.bc)
            .field("diffusion", &self.diffusion)
            .field("has_exact", &self.exact.is_some())
            .field("mismatched", &self.mismatched)
            .finish()
    }
}

impl ProblemSpec {
    pub fn species(&self) -> usize {
        self.diffusion.len()
    }
}

fn linear_decay(u: &[f64], _t: f64, out: &mut [f64]) {
    for (o, x) in out.iter_mut().zip(u) {
        *o = -x;
    }
}

pub const BRUSSELATOR_EPSILON: f64 = 2e-3;
pub const BRUSSELATOR_A: f64 = 1.0;
pub const BRUSSELATOR_B: f64 = 3.4;

pub fn problem_spec(kind: ProblemKind) -> ProblemSpec {
    match kind {
        ProblemKind::DirichletLinear => ProblemSpec {
            kind,
            domain: (-PI / 2.0, PI / 2.0),
            bc: BoundaryKind::HomogeneousDirichlet,
            diffusion: vec![1.0],
            reaction: Arc::new(linear_decay),
            initial: Arc::new(|x, y| vec![x.cos() * y.cos()]),
            exact: Some(Arc::new(|x, y, t| vec![(-3.0 * t).exp() * x.cos() * y.cos()])),
            mismatched: false,
        },
        ProblemKind::NeumannLinear => ProblemSpec {
            kind,
            domain: (-PI, PI),
            bc: BoundaryKind::HomogeneousNeumann,
            diffusion: vec![1.0],
            reaction: Arc::new(linear_decay),
            initial: Arc::new(|x, y| vec![x.cos() * y.cos()]),
            exact: Some(Arc::new(|x, y, t| vec![(-3.0 * t).exp() * x.cos() * y.cos()])),
            mismatched: false,
        },
        ProblemKind::MichaelisMenten => ProblemSpec {
            kind,
            domain: (0.0, 1.0),
            bc: BoundaryKind::HomogeneousDirichlet,
            diffusion: vec![1.0],
            reaction: Arc::new(|u: &[f64], _t: f64, out: &mut [f64]| {
                for (o, x) in out.iter_mut().zip(u) {
                    *o = -x / (1.0 + x);
                }
            }),
            initial: Arc::new(|_, _| vec![1.0]),
            exact: None,
            mismatched: true,
        },
        ProblemKind::Brusselator => ProblemSpec {
            kind,
            domain: (0.0, 1.0),
            bc: BoundaryKind::HomogeneousNeumann,
            diffusion: vec![BRUSSELATOR_EPSILON, BRUSSELATOR_EPSILON],
            reaction: Arc::new(|uv: &[f64], _t: f64, out: &mut [f64]| {
                let n = uv.len() / 2;
                let (u, v) = uv.split_at(n);
                let (fu, fv) = out.split_at_mut(n);
                for j in 0..n {
                    let uuv = u[j] * u[j] * v[j];
                    fu[j] = BRUSSELATOR_A + uuv - (BRUSSELATOR_B + 1.0) * u[j];
                    fv[j] = BRUSSELATOR_B * u[j] - uuv;
                }
            }),
            initial: Arc::new(|x, y| vec![0.5 + y, 1.0 + 5.0 * x]),
            exact: None,
            mismatched: false,
        },
    }
}

/// A problem on a concrete mesh, with its assembled system matrix.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub grid: Grid1D,
    pub matrix: SparseMatrix,
}

/// Builds a named problem with `m` interior points per direction.
pub fn make_problem(name: &str, m: usize) -> Result<Problem> {
    let kind: ProblemKind = name.parse()?;
    let spec = problem_spec(kind);
    let grid = Grid1D::new(spec.domain.0, spec.domain.1, m)?;
    Problem::new(spec, grid)
}

/// Builds a named problem on the grid whose spacing is closest to `h`.
pub fn make_problem_near_h(name: &str, h: f64) -> Result<Problem> {
    let kind: ProblemKind = name.parse()?;
    let spec = problem_spec(kind);
    let grid = Grid1D::nearest(spec.domain.0, spec.domain.1, h)?;
    Problem::new(spec, grid)
}

impl Problem {
    pub fn new(spec: ProblemSpec, grid: Grid1D) -> Result<Self> {
        if (grid.a(), grid.b()) != spec.domain {
            return Err(Error::InvalidGrid(format!(
                "grid spans ({}, {}) but the domain is ({}, {})",
                grid.a(),
                grid.b(),
                spec.domain.0,
                spec.domain.1
            )));
        }
        let matrix = assemble_system_matrix(&grid, &grid, spec.bc, &spec.diffusion)?;
        Ok(Self { spec, grid, matrix })
    }

    pub fn kind(&self) -> ProblemKind {
        self.spec.kind
    }

    /// Unknowns per direction.
    pub fn points_per_side(&self) -> usize {
        self.grid.unknowns(self.spec.bc)
    }

    pub fn n_unknowns(&self) -> usize {
        self.matrix.nrows()
    }

    /// Samples a pointwise field on the unknown nodes, species-major, x fastest.
    pub fn sample<G>(&self, field: G) -> Vec<f64>
    where
        G: Fn(f64, f64) -> Vec<f64>,
    {
        let nodes = self.grid.unknown_nodes(self.spec.bc);
        let p = nodes.len();
        let s = self.spec.species();
        let mut out = vec![0.0; s * p * p];
        for (iy, &y) in nodes.iter().enumerate() {
            for (ix, &x) in nodes.iter().enumerate() {
                for (sp, v) in field(x, y).into_iter().enumerate().take(s) {
                    out[sp * p * p + iy * p + ix] = v;
                }
            }
        }
        out
    }

    pub fn initial_on_grid(&self) -> Vec<f64> {
        self.sample(|x, y| (self.spec.initial)(x, y))
    }

    pub fn initial_state(&self) -> State {
        State::new(self.initial_on_grid(), 0.0)
    }

    pub fn exact_on_grid(&self, t: f64) -> Result<Vec<f64>> {
        let exact = self
            .spec
            .exact
            .as_ref()
            .ok_or_else(|| Error::NoExactSolution(self.kind().name().into()))?;
        Ok(self.sample(|x, y| exact(x, y, t)))
    }

    /// `‖dU/dt + AU - F(U)‖∞` for the sampled exact solution at time `t`.
    pub fn semi_discrete_residual(&self, t: f64) -> Result<f64> {
        let dt = 1e-5;
        let u = self.exact_on_grid(t)?;
        let up = self.exact_on_grid(t + dt)?;
        let um = self.exact_on_grid(t - dt)?;
        let au = self.matrix.matvec(&u)?;
        let f = eval_reaction(&self.spec, &u, t)?;
        Ok((0..u.len())
            .map(|j| ((up[j] - um[j]) / (2.0 * dt) + au[j] - f[j]).abs())
            .fold(0.0, f64::max))
    }
}

/// `F(U, t)`; rejects non-finite input.
pub fn eval_reaction(spec: &ProblemSpec, u: &[f64], t: f64) -> Result<Vec<f64>> {
    if let Some(j) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(j));
    }
    let mut out = vec![0.0; u.len()];
    (spec.reaction)(u, t, &mut out);
    Ok(out)
}

pub fn exact_on_grid(problem: &Problem, t: f64) -> Result<Vec<f64>> {
    problem.exact_on_grid(t)
}

impl Reaction for ProblemSpec {
    fn eval(&self, u: &[f64], t: f64, out: &mut [f64]) {
        (self.reaction)(u, t, out)
    }
}

impl Reaction for Problem {
    fn eval(&self, u: &[f64], t: f64, out: &mut [f64]) {
        (self.spec.reaction)(u, t, out)
    }
}
