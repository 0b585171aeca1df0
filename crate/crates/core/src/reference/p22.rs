//! ETDRK4 with the (2,2) Padé approximation in place of the exponential.
//!
//! ```text
//! R₂₂(-X) = (I - X/2 + X²/12)(I + X/2 + X²/12)⁻¹,   D(X) = I + X/2 + X²/12
//! P̃  = (k/2) D(kA/2)⁻¹
//! P₁ = (k/12)(2I - kA) D(kA)⁻¹
//! P₂ = (k/6) D(kA)⁻¹
//! P₃ = (k/12)(2I + kA) D(kA)⁻¹
//! ```
//!
//! Every stage is one solve against a quadratic in `A`. The scheme is
//! A-acceptable but not L-acceptable, so stiff modes are not damped.

use crate::error::{Error, Result};
use crate::sparse::{Factorization, SparseMatrix};
use crate::stepper::{check_len, ensure_finite, Reaction, Stage, State, TimeStepper};

pub struct P22Workspace {
    k: f64,
    n: usize,
    a: SparseMatrix,
    d_half: Factorization,
    d_full: Factorization,
    n_half: SparseMatrix,
    n_full: SparseMatrix,
}

/// `I + c₁A + c₂A²`.
fn quadratic(id: &SparseMatrix, a: &SparseMatrix, a2: &SparseMatrix, c1: f64, c2: f64) -> Result<SparseMatrix> {
    SparseMatrix::add_scaled(&SparseMatrix::add_scaled(id, a, 1.0, c1)?, a2, 1.0, c2)
}

impl P22Workspace {
    pub fn setup(a: &SparseMatrix, k: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {k}")));
        }
        let n = a.nrows();
        let id = SparseMatrix::identity(n);
        let a2 = a.matmul(a)?;
        let factor = |label: &str, m: SparseMatrix| {
            Factorization::new(&m).map_err(|e| Error::Setup {
                system: label.to_string(),
                source: Box::new(e),
            })
        };
        Ok(Self {
            k,
            n,
            d_half: factor("I + kA/4 + k²A²/48", quadratic(&id, a, &a2, k / 4.0, k * k / 48.0)?)?,
            d_full: factor("I + kA/2 + k²A²/12", quadratic(&id, a, &a2, k / 2.0, k * k / 12.0)?)?,
            n_half: quadratic(&id, a, &a2, -k / 4.0, k * k / 48.0)?,
            n_full: quadratic(&id, a, &a2, -k / 2.0, k * k / 12.0)?,
            a: a.clone(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn half_solve(&self, v: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = self.n_half.matvec(v)?;
        for (r, x) in rhs.iter_mut().zip(f) {
            *r += 0.5 * self.k * x;
        }
        self.d_half.solve(&rhs)
    }
}

/// One step of the (2,2) Padé scheme.
pub fn p22_step(ws: &P22Workspace, state: &State, reaction: &dyn Reaction) -> Result<State> {
    check_len("p22 step", ws.n, &state.u)?;
    let (k, t, idx, n) = (ws.k, state.t, state.steps, ws.n);
    let u = &state.u;
    let eval = |v: &[f64], t: f64| {
        let mut f = vec![0.0; n];
        reaction.eval(v, t, &mut f);
        f
    };

    let f_n = eval(u, t);
    let a = ws.half_solve(u, &f_n)?;
    ensure_finite(&a, Stage::A, idx)?;
    let f_a = eval(&a, t + 0.5 * k);
    let b = ws.half_solve(u, &f_a)?;
    ensure_finite(&b, Stage::B, idx)?;
    let f_b = eval(&b, t + 0.5 * k);
    let mix: Vec<f64> = f_b.iter().zip(&f_n).map(|(x, y)| 2.0 * x - y).collect();
    let c = ws.half_solve(&a, &mix)?;
    ensure_finite(&c, Stage::C, idx)?;
    let f_c = eval(&c, t + k);

    let af_n = ws.a.matvec(&f_n)?;
    let af_c = ws.a.matvec(&f_c)?;
    let mut rhs = ws.n_full.matvec(u)?;
    for j in 0..n {
        rhs[j] += k / 12.0 * (2.0 * f_n[j] - k * af_n[j])
            + k / 3.0 * (f_a[j] + f_b[j])
            + k / 12.0 * (2.0 * f_c[j] + k * af_c[j]);
    }
    let next = ws.d_full.solve(&rhs)?;
    ensure_finite(&next, Stage::Update, idx)?;
    Ok(State {
        u: next,
        t: t + k,
        steps: idx + 1,
    })
}

impl TimeStepper for P22Workspace {
    fn step_size(&self) -> f64 {
        self.k
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn step(&self, state: &State, reaction: &dyn Reaction) -> Result<State> {
        p22_step(self, state, reaction)
    }
}
