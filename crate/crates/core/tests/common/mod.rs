//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use etdrk4rdp::harness::linf_error;
use etdrk4rdp::reference::{etdrk4_exact_step, DenseEtdrk4, DenseMatrix};
use etdrk4rdp::stepper::{State, StepperWorkspace, TimeStepper};
use etdrk4rdp::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Diagonalizable {
    pub a: SparseMatrix,
    pub v: DenseMatrix,
    pub lambda: Vec<f64>,
}

pub fn transpose(m: &DenseMatrix) -> DenseMatrix {
    let n = m.dim();
    let mut t = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, m.get(j, i));
        }
    }
    t
}

/// `V diag(λ) V⁻¹` with `λ ∈ [1, λ_max)` and `cond(V)` near 2.
pub fn random_diagonalizable(rng: &mut ChaCha8Rng, n: usize, lambda_max: f64) -> Diagonalizable {
    let mut v = DenseMatrix::identity(n);
    let spread = 0.3 / (n as f64).sqrt();
    for i in 0..n {
        for j in 0..n {
            v.set(i, j, v.get(i, j) + rng.gen_range(-spread..spread));
        }
    }
    let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..lambda_max)).collect();
    let mut d = DenseMatrix::zeros(n);
    for (i, &l) in lambda.iter().enumerate() {
        d.set(i, i, l);
    }
    // A = (V D) V⁻¹, via Vᵀ Aᵀ = (V D)ᵀ
    let vd = v.matmul(&d).unwrap();
    let a = transpose(&transpose(&v).solve_matrix(&transpose(&vd)).unwrap());
    Diagonalizable {
        a: SparseMatrix::from_dense(n, n, a.data()).unwrap(),
        v,
        lambda,
    }
}

pub fn smooth_reaction(u: &[f64], t: f64, out: &mut [f64]) {
    for (o, x) in out.iter_mut().zip(u) {
        *o = x.sin() - 0.5 * x * x + 0.3 * t.cos();
    }
}

pub fn relative_gap(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    linf_error(x, y).unwrap() / scale
}

/// Relative gap between the sparse stepper and the dense rational path for one seed.
///
/// The dense path cancels like `(kλ_min)⁻³` against `‖kA‖²`; `λ < 20` keeps that below 1e-11.
pub fn dense_equivalence_gap(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let sys = random_diagonalizable(&mut rng, n, 20.0);
    let k = rng.gen_range(0.05..0.5);
    let u0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s0 = State::new(u0, 0.0);
    let x = StepperWorkspace::setup(&sys.a, k)
        .unwrap()
        .step(&s0, &smooth_reaction)
        .unwrap();
    let y = DenseEtdrk4::rational(&sys.a, k)
        .unwrap()
        .step(&s0, &smooth_reaction)
        .unwrap();
    relative_gap(&x.u, &y.u)
}

/// Difference between the stepper with `A = 0` and a textbook RK4 step.
pub fn rk4_reduction_gap() -> f64 {
    let (n, k, t) = (5, 0.2, 0.3);
    let ws = StepperWorkspace::setup(&SparseMatrix::zeros(n, n), k).unwrap();
    let u: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.2).collect();
    let f = |v: &[f64], t: f64| {
        let mut out = vec![0.0; n];
        smooth_reaction(v, t, &mut out);
        out
    };
    let axpy = |v: &[f64], c: f64, d: &[f64]| -> Vec<f64> { v.iter().zip(d).map(|(a, b)| a + c * b).collect() };
    let k1 = f(&u, t);
    let k2 = f(&axpy(&u, k / 2.0, &k1), t + k / 2.0);
    let k3 = f(&axpy(&u, k / 2.0, &k2), t + k / 2.0);
    let k4 = f(&axpy(&u, k, &k3), t + k);
    let rk4: Vec<f64> = (0..n)
        .map(|i| u[i] + k / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let got = ws.step(&State { u, t, steps: 0 }, &smooth_reaction).unwrap();
    linf_error(&got.u, &rk4).unwrap()
}

/// One-step difference from exact-exponential ETDRK4 on `u' = -u + cos t`, `u(0) = 1`.
pub fn exact_one_step_gap(k: f64) -> f64 {
    let a = SparseMatrix::diagonal(&[1.0]);
    let forcing = |_u: &[f64], t: f64, out: &mut [f64]| out[0] = t.cos();
    let ws = StepperWorkspace::setup(&a, k).unwrap();
    let rdp = ws.step(&State::new(vec![1.0], 0.0), &forcing).unwrap().u[0];
    let exact = etdrk4_exact_step(&a, &[1.0], 0.0, k, &forcing).unwrap()[0];
    (rdp - exact).abs()
}
