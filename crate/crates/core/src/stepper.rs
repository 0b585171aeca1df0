//! Fixed-step ETDRK4 time advance with the real-distinct-poles rational
//! approximation in place of every matrix exponential.
//!
//! One step solves sixteen shifted systems in four groups of four:
//!
//! ```text
//! aₙ   = Σᵢ (I + bᵢkA/2)⁻¹ (wᵢUₙ + qᵢF(Uₙ, tₙ))
//! bₙ   = Σᵢ (I + bᵢkA/2)⁻¹ (wᵢUₙ + qᵢF(aₙ, tₙ + k/2))
//! cₙ   = Σᵢ (I + bᵢkA/2)⁻¹ (wᵢaₙ + qᵢ[2F(bₙ, tₙ + k/2) - F(Uₙ, tₙ)])
//! Uₙ₊₁ = Σᵢ (I + bᵢkA)⁻¹   (wᵢUₙ + rᵢFₙ + 2gᵢ(Fₐ + F_b) + hᵢF_c)
//! ```
//!
//! The four solves inside a group are independent and run on the worker
//! pool; group results are always summed in index order so the answer does
//! not depend on the worker count.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{stage_weights, StageWeights, RDP};
use crate::sparse::{Factorization, SparseMatrix};

/// Reaction term `F(U, t)` written into `out`.
pub trait Reaction: Sync {
    fn eval(&self, u: &[f64], t: f64, out: &mut [f64]);
}

impl<F> Reaction for F
where
    F: Fn(&[f64], f64, &mut [f64]) + Sync,
{
    fn eval(&self, u: &[f64], t: f64, out: &mut [f64]) {
        self(u, t, out)
    }
}

/// Reaction that is identically zero.
pub struct NoReaction;

impl Reaction for NoReaction {
    fn eval(&self, _u: &[f64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Stage {
    A,
    B,
    C,
    Update,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::A => "a",
            Stage::B => "b",
            Stage::C => "c",
            Stage::Update => "update",
        })
    }
}

/// Solution vector (species-major) at time `t`, with the number of steps taken.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub t: f64,
    pub steps: usize,
}

impl State {
    pub fn new(u: Vec<f64>, t: f64) -> Self {
        Self { u, t, steps: 0 }
    }
}

/// Anything that advances a [`State`] by one fixed step.
pub trait TimeStepper: Sync {
    fn step_size(&self) -> f64;
    fn dim(&self) -> usize;
    fn step(&self, state: &State, reaction: &dyn Reaction) -> Result<State>;
}

pub(crate) fn ensure_finite(v: &[f64], stage: Stage, step: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { stage, step })
    }
}

pub(crate) fn check_len(op: &'static str, expected: usize, v: &[f64]) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            op,
            expected,
            found: v.len(),
        })
    }
}

/// Factorizations and weights for one `(A, k)` pair.
pub struct StepperWorkspace {
    half: Vec<Factorization>,
    full: Vec<Factorization>,
    weights: StageWeights,
    k: f64,
    n: usize,
    pool: Option<rayon::ThreadPool>,
}

impl fmt::Debug for StepperWorkspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StepperWorkspace")
            .field("k", &self.k)
            .field("n", &self.n)
            .field("workers", &self.workers())
            .finish()
    }
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    if workers == 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))
}

impl StepperWorkspace {
    /// Serial workspace.
    pub fn setup(a: &SparseMatrix, k: f64) -> Result<Self> {
        Self::setup_with_workers(a, k, 1)
    }

    /// Changes the worker count, keeping the factorizations.
    pub fn set_workers(&mut self, workers: usize) -> Result<()> {
        self.pool = build_pool(workers)?;
        Ok(())
    }

    pub fn setup_with_workers(a: &SparseMatrix, k: f64, workers: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let weights = stage_weights(k)?;
        let pool = build_pool(workers)?;
        let n = a.nrows();
        let id = SparseMatrix::identity(n);

        // (label, shift) for the eight systems I + shift·A
        let systems: Vec<(String, f64)> = RDP
            .b
            .iter()
            .enumerate()
            .map(|(i, &b)| (format!("I + (b{}/2)kA", i + 1), 0.5 * b * k))
            .chain(
                RDP.b
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (format!("I + b{}kA", i + 1), b * k)),
            )
            .collect();
        let factor = |(label, shift): &(String, f64)| -> Result<Factorization> {
            let m = SparseMatrix::add_scaled(&id, a, 1.0, *shift)?;
            Factorization::new(&m).map_err(|e| Error::Setup {
                system: format!("{label} (shift {shift:e})"),
                source: Box::new(e),
            })
        };
        let factors: Vec<Factorization> = match &pool {
            Some(p) => p.install(|| systems.par_iter().map(factor).collect::<Result<_>>())?,
            None => systems.iter().map(factor).collect::<Result<_>>()?,
        };
        let mut factors = factors.into_iter();
        let half: Vec<_> = factors.by_ref().take(4).collect();
        let full: Vec<_> = factors.collect();
        Ok(Self {
            half,
            full,
            weights,
            k,
            n,
            pool,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n_unknowns(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &StageWeights {
        &self.weights
    }

    pub fn workers(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn half_factors(&self) -> &[Factorization] {
        &self.half
    }

    pub fn full_factors(&self) -> &[Factorization] {
        &self.full
    }

    /// `Σᵢ factors[i]⁻¹ rhs(i)`, summed in index order.
    fn solve_group<R>(&self, factors: &[Factorization], rhs: R) -> Result<Vec<f64>>
    where
        R: Fn(usize, &mut [f64]) + Sync,
    {
        let n = self.n;
        let branch = |i: usize| -> Result<Vec<f64>> {
            let mut b = vec![0.0; n];
            rhs(i, &mut b);
            let mut y = vec![0.0; n];
            let mut work = vec![0.0; n];
            factors[i].solve_into(&b, &mut y, &mut work)?;
            Ok(y)
        };
        let parts: Vec<Vec<f64>> = match &self.pool {
            Some(p) => p.install(|| (0..4).into_par_iter().map(branch).collect::<Result<_>>())?,
            None => (0..4).map(branch).collect::<Result<_>>()?,
        };
        let mut sum = parts[0].clone();
        for part in &parts[1..] {
            for (s, v) in sum.iter_mut().zip(part) {
                *s += v;
            }
        }
        Ok(sum)
    }

    pub fn stage_a(&self, u: &[f64], f_n: &[f64]) -> Result<Vec<f64>> {
        check_len("stage_a state", self.n, u)?;
        check_len("stage_a reaction", self.n, f_n)?;
        let StageWeights { w, q, .. } = &self.weights;
        self.solve_group(&self.half, |i, b| {
            for j in 0..b.len() {
                b[j] = w[i] * u[j] + q[i] * f_n[j];
            }
        })
    }

    pub fn stage_b(&self, u: &[f64], f_a: &[f64]) -> Result<Vec<f64>> {
        check_len("stage_b state", self.n, u)?;
        check_len("stage_b reaction", self.n, f_a)?;
        let StageWeights { w, q, .. } = &self.weights;
        self.solve_group(&self.half, |i, b| {
            for j in 0..b.len() {
                b[j] = w[i] * u[j] + q[i] * f_a[j];
            }
        })
    }

    pub fn stage_c(&self, a_n: &[f64], f_b: &[f64], f_n: &[f64]) -> Result<Vec<f64>> {
        check_len("stage_c state", self.n, a_n)?;
        check_len("stage_c reaction", self.n, f_b)?;
        check_len("stage_c reaction", self.n, f_n)?;
        let StageWeights { w, q, .. } = &self.weights;
        self.solve_group(&self.half, |i, b| {
            for j in 0..b.len() {
                b[j] = w[i] * a_n[j] + q[i] * (2.0 * f_b[j] - f_n[j]);
            }
        })
    }

    pub fn update(&self, u: &[f64], f_n: &[f64], f_a: &[f64], f_b: &[f64], f_c: &[f64]) -> Result<Vec<f64>> {
        check_len("update state", self.n, u)?;
        for f in [f_n, f_a, f_b, f_c] {
            check_len("update reaction", self.n, f)?;
        }
        let StageWeights { w, r, g, h, .. } = &self.weights;
        self.solve_group(&self.full, |i, b| {
            for j in 0..b.len() {
                b[j] = w[i] * u[j] + r[i] * f_n[j] + 2.0 * g[i] * (f_a[j] + f_b[j]) + h[i] * f_c[j];
            }
        })
    }
}

impl TimeStepper for StepperWorkspace {
    fn step_size(&self) -> f64 {
        self.k
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn step(&self, state: &State, reaction: &dyn Reaction) -> Result<State> {
        check_len("step", self.n, &state.u)?;
        let (k, t, idx) = (self.k, state.t, state.steps);
        let u = &state.u;
        let mut f_n = vec![0.0; self.n];
        reaction.eval(u, t, &mut f_n);

        let a = self.stage_a(u, &f_n)?;
        ensure_finite(&a, Stage::A, idx)?;
        let mut f_a = vec![0.0; self.n];
        reaction.eval(&a, t + 0.5 * k, &mut f_a);

        let b = self.stage_b(u, &f_a)?;
        ensure_finite(&b, Stage::B, idx)?;
        let mut f_b = vec![0.0; self.n];
        reaction.eval(&b, t + 0.5 * k, &mut f_b);

        let c = self.stage_c(&a, &f_b, &f_n)?;
        ensure_finite(&c, Stage::C, idx)?;
        let mut f_c = vec![0.0; self.n];
        reaction.eval(&c, t + k, &mut f_c);

        let next = self.update(u, &f_n, &f_a, &f_b, &f_c)?;
        ensure_finite(&next, Stage::Update, idx)?;
        Ok(State {
            u: next,
            t: t + k,
            steps: idx + 1,
        })
    }
}

/// Number of steps of size `k` covering `span`, or an error if they do not tile it.
///
/// A few ulps of slack absorb the rounding of decimal step sizes such as 0.1.
pub fn step_count(span: f64, k: f64) -> Result<usize> {
    if !(k > 0.0 && k.is_finite()) || !(span >= 0.0 && span.is_finite()) {
        return Err(Error::StepCount { span, k });
    }
    let exact = span / k;
    let nearest = exact.round();
    if (exact - nearest).abs() > 4.0 * f64::EPSILON * nearest.max(1.0) {
        return Err(Error::StepCount { span, k });
    }
    Ok(nearest as usize)
}

/// Steps from `s0` to `t_final`. The observer sees the initial state (index 0)
/// and the state after every step.
pub fn integrate<S, O>(stepper: &S, s0: State, t_final: f64, reaction: &dyn Reaction, mut observer: O) -> Result<State>
where
    S: TimeStepper + ?Sized,
    O: FnMut(usize, &State),
{
    let k = stepper.step_size();
    let steps = step_count(t_final - s0.t, k)?;
    check_len("integrate", stepper.dim(), &s0.u)?;
    let t0 = s0.t;
    observer(0, &s0);
    let mut state = s0;
    for i in 1..=steps {
        let mut next = stepper.step(&state, reaction)?;
        next.t = if i == steps { t_final } else { t0 + i as f64 * k };
        observer(i, &next);
        state = next;
    }
    Ok(state)
}
