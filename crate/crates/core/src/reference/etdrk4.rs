//! ETDRK4 with explicitly formed dense coefficient matrices.
//!
//! With `X = kA` and `E(τ)` the propagator over time `τ`,
//!
//! ```text
//! P̃  = A⁻¹ (I - E(k/2))
//! P₁ = k⁻² (-A)⁻³ [-4I + X + E(k)(4I + 3X + X²)]
//! P₂ = k⁻² (-A)⁻³ [ 2I - X - E(k)(2I + X)]
//! P₃ = k⁻² (-A)⁻³ [-4I + 3X - X² + E(k)(4I + X)]
//! ```
//!
//! The propagator is either the true exponential or the rational
//! approximation, which makes this the oracle for the sparse stepper.

use crate::error::{Error, Result};
use crate::rational::RDP;
use crate::sparse::SparseMatrix;
use crate::stepper::{ensure_finite, Reaction, Stage, State, TimeStepper};

use super::dense::DenseMatrix;

#[derive(Clone, Debug)]
pub struct Etdrk4Coefficients {
    pub k: f64,
    pub half: DenseMatrix,
    pub full: DenseMatrix,
    pub p_half: DenseMatrix,
    pub p1: DenseMatrix,
    pub p2: DenseMatrix,
    pub p3: DenseMatrix,
}

/// `R(M)` in product form, approximating `e^{M}`.
pub fn rational_propagator(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.dim();
    let id = DenseMatrix::identity(n);
    let x = m.scaled(-1.0);
    let [a1, a2, a3] = RDP.a;
    // Horner: I + X(a₁I + X(a₂I + a₃X))
    let mut num = id.combine(a2, &x, a3)?;
    num = x.matmul(&num)?;
    num = num.combine(1.0, &id, a1)?;
    num = x.matmul(&num)?.combine(1.0, &id, 1.0)?;
    // one factor at a time; the product is far worse conditioned
    for &b in &RDP.b {
        num = id.combine(1.0, &x, b)?.solve_matrix(&num)?;
    }
    Ok(num)
}

pub fn exponential_propagator(m: &DenseMatrix) -> Result<DenseMatrix> {
    m.expm()
}

/// `[e^M, φ₁(M), φ₂(M), φ₃(M)]` by Taylor series on `M/2ˢ` and the doubling relations
///
/// ```text
/// φ₀(2Z) = φ₀(Z)²
/// φⱼ(2Z) = 2⁻ʲ [φ₀(Z)φⱼ(Z) + Σ_{l=1..j} φₗ(Z)/(j-l)!]
/// ```
///
/// No inverse of `M` is formed, so singular and nearly singular `M` are fine.
pub fn phi_functions(m: &DenseMatrix) -> Result<[DenseMatrix; 4]> {
    let n = m.dim();
    let norm = m.norm_inf();
    if !norm.is_finite() {
        return Err(Error::ExpmOverflow(norm));
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = m.scaled(0.5f64.powi(squarings));

    // φⱼ(Y) = Σᵢ Yⁱ/(i+j)!
    let mut phi = [
        DenseMatrix::zeros(n),
        DenseMatrix::zeros(n),
        DenseMatrix::zeros(n),
        DenseMatrix::zeros(n),
    ];
    let mut power = DenseMatrix::identity(n);
    let mut factorial = 1.0;
    for i in 0..40 {
        let mut f = factorial;
        for (j, p) in phi.iter_mut().enumerate() {
            if j > 0 {
                f *= (i + j) as f64;
            }
            *p = p.combine(1.0, &power, 1.0 / f)?;
        }
        power = power.matmul(&y)?;
        factorial *= (i + 1) as f64;
        if power.norm_inf() / factorial < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        let [e, p1, p2, p3] = &phi;
        let next = [
            e.matmul(e)?,
            e.matmul(p1)?.combine(0.5, p1, 0.5)?,
            e.matmul(p2)?.combine(0.25, p1, 0.25)?.combine(1.0, p2, 0.25)?,
            e.matmul(p3)?
                .combine(0.125, p1, 0.0625)?
                .combine(1.0, p2, 0.125)?
                .combine(1.0, p3, 0.125)?,
        ];
        phi = next;
    }
    if phi.iter().all(|p| p.data().iter().all(|v| v.is_finite())) {
        Ok(phi)
    } else {
        Err(Error::ExpmOverflow(norm))
    }
}

impl Etdrk4Coefficients {
    /// `propagator(M)` must approximate `e^{M}`.
    pub fn build<P>(a: &DenseMatrix, k: f64, propagator: P) -> Result<Self>
    where
        P: Fn(&DenseMatrix) -> Result<DenseMatrix>,
    {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {k}")));
        }
        let n = a.dim();
        let id = DenseMatrix::identity(n);
        let half = propagator(&a.scaled(-0.5 * k))?;
        let full = propagator(&a.scaled(-k))?;
        if a.is_zero() {
            return Ok(Self {
                k,
                half,
                full,
                p_half: id.scaled(0.5 * k),
                p1: id.scaled(k / 6.0),
                p2: id.scaled(k / 6.0),
                p3: id.scaled(k / 6.0),
            });
        }
        let x = a.scaled(k);
        let x2 = x.matmul(&x)?;
        let p_half = a.solve_matrix(&id.combine(1.0, &half, -1.0)?)?;
        // k⁻²(-A)⁻³ M = -k⁻² A⁻³ M
        let cube = |m: DenseMatrix| -> Result<DenseMatrix> {
            let y = a.solve_matrix(&a.solve_matrix(&a.solve_matrix(&m)?)?)?;
            Ok(y.scaled(-1.0 / (k * k)))
        };
        let lin = |c0: f64, c1: f64, c2: f64| -> Result<DenseMatrix> {
            id.scaled(c0).combine(1.0, &x, c1)?.combine(1.0, &x2, c2)
        };
        let p1 = cube(lin(-4.0, 1.0, 0.0)?.combine(1.0, &full.matmul(&lin(4.0, 3.0, 1.0)?)?, 1.0)?)?;
        let p2 = cube(lin(2.0, -1.0, 0.0)?.combine(1.0, &full.matmul(&lin(2.0, 1.0, 0.0)?)?, -1.0)?)?;
        let p3 = cube(lin(-4.0, 3.0, -1.0)?.combine(1.0, &full.matmul(&lin(4.0, 1.0, 0.0)?)?, 1.0)?)?;
        Ok(Self {
            k,
            half,
            full,
            p_half,
            p1,
            p2,
            p3,
        })
    }

    /// Built from [`phi_functions`]; `A` may be singular.
    pub fn exact(a: &DenseMatrix, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {k}")));
        }
        let [half, phi1_half, _, _] = phi_functions(&a.scaled(-0.5 * k))?;
        let [full, phi1, phi2, phi3] = phi_functions(&a.scaled(-k))?;
        // P₁ = k(φ₁ - 3φ₂ + 4φ₃), P₂ = k(φ₂ - 2φ₃), P₃ = k(4φ₃ - φ₂)
        let p1 = phi1.combine(k, &phi2, -3.0 * k)?.combine(1.0, &phi3, 4.0 * k)?;
        let p2 = phi2.combine(k, &phi3, -2.0 * k)?;
        let p3 = phi3.combine(4.0 * k, &phi2, -k)?;
        Ok(Self {
            k,
            half,
            full,
            p_half: phi1_half.scaled(0.5 * k),
            p1,
            p2,
            p3,
        })
    }

    pub fn rational(a: &DenseMatrix, k: f64) -> Result<Self> {
        Self::build(a, k, rational_propagator)
    }

    fn dim(&self) -> usize {
        self.full.dim()
    }

    /// One step of the ETDRK4 template.
    pub fn apply(&self, state: &State, reaction: &dyn Reaction) -> Result<State> {
        let n = self.dim();
        if state.u.len() != n {
            return Err(Error::DimensionMismatch {
                op: "dense etdrk4 step",
                expected: n,
                found: state.u.len(),
            });
        }
        let (k, t, idx) = (self.k, state.t, state.steps);
        let u = &state.u;
        let eval = |v: &[f64], t: f64| {
            let mut f = vec![0.0; n];
            reaction.eval(v, t, &mut f);
            f
        };
        let add = |x: Vec<f64>, y: Vec<f64>| -> Vec<f64> { x.iter().zip(&y).map(|(a, b)| a + b).collect() };

        let f_n = eval(u, t);
        let e_u = self.half.matvec(u)?;
        let a = add(e_u.clone(), self.p_half.matvec(&f_n)?);
        ensure_finite(&a, Stage::A, idx)?;
        let f_a = eval(&a, t + 0.5 * k);
        let b = add(e_u, self.p_half.matvec(&f_a)?);
        ensure_finite(&b, Stage::B, idx)?;
        let f_b = eval(&b, t + 0.5 * k);
        let mix: Vec<f64> = f_b.iter().zip(&f_n).map(|(x, y)| 2.0 * x - y).collect();
        let c = add(self.half.matvec(&a)?, self.p_half.matvec(&mix)?);
        ensure_finite(&c, Stage::C, idx)?;
        let f_c = eval(&c, t + k);
        let ab: Vec<f64> = f_a.iter().zip(&f_b).map(|(x, y)| 2.0 * (x + y)).collect();
        let mut next = self.full.matvec(u)?;
        for part in [self.p1.matvec(&f_n)?, self.p2.matvec(&ab)?, self.p3.matvec(&f_c)?] {
            next = add(next, part);
        }
        ensure_finite(&next, Stage::Update, idx)?;
        Ok(State {
            u: next,
            t: t + k,
            steps: idx + 1,
        })
    }
}

/// Dense ETDRK4 as a [`TimeStepper`].
#[derive(Clone, Debug)]
pub struct DenseEtdrk4 {
    coefficients: Etdrk4Coefficients,
}

impl DenseEtdrk4 {
    /// True matrix exponential.
    pub fn exact(a: &SparseMatrix, k: f64) -> Result<Self> {
        Ok(Self {
            coefficients: Etdrk4Coefficients::exact(&DenseMatrix::from_sparse(a)?, k)?,
        })
    }

    /// Rational approximation formed densely.
    pub fn rational(a: &SparseMatrix, k: f64) -> Result<Self> {
        Ok(Self {
            coefficients: Etdrk4Coefficients::rational(&DenseMatrix::from_sparse(a)?, k)?,
        })
    }

    pub fn coefficients(&self) -> &Etdrk4Coefficients {
        &self.coefficients
    }
}

impl TimeStepper for DenseEtdrk4 {
    fn step_size(&self) -> f64 {
        self.coefficients.k
    }

    fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    fn step(&self, state: &State, reaction: &dyn Reaction) -> Result<State> {
        self.coefficients.apply(state, reaction)
    }
}

/// One exact-exponential ETDRK4 step from `(u, t)`.
pub fn etdrk4_exact_step(a: &SparseMatrix, u: &[f64], t: f64, k: f64, reaction: &dyn Reaction) -> Result<Vec<f64>> {
    let stepper = DenseEtdrk4::exact(a, k)?;
    Ok(stepper.step(&State::new(u.to_vec(), t), reaction)?.u)
}
