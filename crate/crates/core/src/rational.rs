//! The fourth-order L-acceptable rational approximation with real distinct
//! poles, and the partial-fraction weights of every matrix function the
//! stepper needs.
//!
//! For `s ≥ 0` the approximation to `e^{-s}` is
//!
//! ```text
//!            1 + a₁s + a₂s² + a₃s³          4      wᵢ
//! R(-s) = ---------------------------  =   Σ  ----------
//!          (1+b₁s)(1+b₂s)(1+b₃s)(1+b₄s)   i=1  1 + bᵢs
//! ```
//!
//! Substituting `R` for the exponential in the ETDRK4 coefficient functions
//! gives rational functions with the same four poles, so each one is a sum of
//! shifted inverses `(I + bᵢkA)⁻¹` (or `(I + bᵢkA/2)⁻¹` for the half step).

use std::fmt;

use crate::error::{Error, Result};

/// Numerator coefficients, pole parameters and partial-fraction weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdpCoefficients {
    pub a: [f64; 3],
    pub b: [f64; 4],
    pub w: [f64; 4],
}

pub const RDP: RdpCoefficients = RdpCoefficients {
    a: [1.579627631895178, 0.303085087930133, -0.324250474367700],
    b: [
        0.4751834017787114,
        1.0000000000000000,
        0.3888888888888889,
        0.7155553412275962,
    ],
    w: [
        20.10707940496431,
        0.5229558818011362,
        -15.21083750434353,
        -4.419197782421921,
    ],
};

pub fn rdp_constants() -> RdpCoefficients {
    RDP
}

/// Elementary symmetric functions of the pole parameters:
/// `Π(1 + bᵢs) = 1 + αs + βs² + γs³ + ρs⁴`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleMoments {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
}

impl RdpCoefficients {
    pub fn moments(&self) -> PoleMoments {
        let [b1, b2, b3, b4] = self.b;
        PoleMoments {
            alpha: b1 + b2 + b3 + b4,
            beta: b1 * b2 + b3 * b4 + (b1 + b2) * (b3 + b4),
            gamma: (b1 + b2) * b3 * b4 + (b3 + b4) * b1 * b2,
            rho: b1 * b2 * b3 * b4,
        }
    }

    pub fn numerator(&self, s: f64) -> f64 {
        let [a1, a2, a3] = self.a;
        1.0 + s * (a1 + s * (a2 + s * a3))
    }

    pub fn denominator(&self, s: f64) -> f64 {
        self.b.iter().map(|&b| 1.0 + b * s).product()
    }

    /// Power-series coefficients of `N(s) - e^{-s} D(s)` up to `s^degree`.
    ///
    /// Evaluating the approximation error through this series avoids the
    /// cancellation in `R(-s) - e^{-s}` for small `s`.
    pub fn defect_series(&self, degree: usize) -> Vec<f64> {
        let m = self.moments();
        let d = [1.0, m.alpha, m.beta, m.gamma, m.rho];
        let n = [1.0, self.a[0], self.a[1], self.a[2]];
        let mut inv_fact = vec![1.0; degree + 1];
        for j in 1..=degree {
            inv_fact[j] = inv_fact[j - 1] / j as f64;
        }
        (0..=degree)
            .map(|j| {
                let exp_d: f64 = (0..=j.min(4))
                    .map(|i| {
                        let sign = if (j - i) % 2 == 0 { 1.0 } else { -1.0 };
                        d[i] * sign * inv_fact[j - i]
                    })
                    .sum();
                n.get(j).copied().unwrap_or(0.0) - exp_d
            })
            .collect()
    }
}

/// `R(-z)` from the product form.
pub fn eval_rdp(z: f64) -> f64 {
    RDP.numerator(z) / RDP.denominator(z)
}

/// `R(-z)` from the partial-fraction form.
pub fn eval_rdp_pf(z: f64) -> f64 {
    RDP.w.iter().zip(&RDP.b).map(|(w, b)| w / (1.0 + b * z)).sum()
}

/// `|R(-z) - e^{-z}|` evaluated without cancellation, for `0 ≤ z ≤ 1`.
pub fn approximation_error(z: f64) -> f64 {
    let series = RDP.defect_series(40);
    let defect = series.iter().rev().fold(0.0, |acc, c| acc * z + c);
    (defect / RDP.denominator(z)).abs()
}

/// `E(y) = |D(iy)|² - |N(iy)|²`, expanded in powers of `y²`.
pub fn e_polynomial(y: f64) -> f64 {
    let [a1, a2, a3] = RDP.a;
    // Π(1 + bᵢ² Y)
    let mut d = [1.0, 0.0, 0.0, 0.0, 0.0];
    for &b in &RDP.b {
        for j in (1..5).rev() {
            d[j] += b * b * d[j - 1];
        }
    }
    // (1 - a₂Y)² + Y(a₁ - a₃Y)²
    let n = [1.0, a1 * a1 - 2.0 * a2, a2 * a2 - 2.0 * a1 * a3, a3 * a3, 0.0];
    let yy = y * y;
    (1..5).rev().fold(0.0, |acc, j| (acc + d[j] - n[j]) * yy)
}

/// Minimum of `E(y)` over the samples; nonnegative certifies A-acceptability there.
pub fn l_acceptability_margin(y_samples: &[f64]) -> f64 {
    y_samples.iter().map(|&y| e_polynomial(y)).fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of `log|R(-z) - e^{-z}|` against `log z` on log-spaced samples.
pub fn contact_order_slope(z_min: f64, z_max: f64, samples: usize) -> f64 {
    let n = samples.max(2);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let lz = z_min.ln() + t * (z_max.ln() - z_min.ln());
            (lz, approximation_error(lz.exp()).ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Which coefficient function a partial-fraction family represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum WeightFamily {
    /// Half-step `P̃` weights `qᵢ` (poles of `I + bᵢkA/2`).
    HalfStep,
    P1,
    P2,
    P3,
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WeightFamily::HalfStep => "q (half-step)",
            WeightFamily::P1 => "r (P1)",
            WeightFamily::P2 => "g (P2)",
            WeightFamily::P3 => "h (P3)",
        };
        f.write_str(name)
    }
}

/// Scalar coefficient function at `x = ka`, divided by `k`, with `R` in place of the exponential.
pub fn defining_function(family: WeightFamily, x: f64) -> f64 {
    match family {
        WeightFamily::HalfStep => -(eval_rdp(x / 2.0) - 1.0) / x,
        WeightFamily::P1 => (4.0 - x - eval_rdp(x) * (4.0 + x * (3.0 + x))) / x.powi(3),
        WeightFamily::P2 => (eval_rdp(x) * (2.0 + x) - (2.0 - x)) / x.powi(3),
        WeightFamily::P3 => (4.0 - 3.0 * x + x * x - eval_rdp(x) * (4.0 + x)) / x.powi(3),
    }
}

/// Arguments at which the partial-fraction identities are enforced.
pub const IDENTITY_POINTS: [f64; 4] = [0.1, 1.0, 10.0, 50.0];
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct IdentityCheck {
    pub family: WeightFamily,
    pub x: f64,
    pub partial_fractions: f64,
    pub defining: f64,
    pub relative_error: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.relative_error <= IDENTITY_TOLERANCE
    }
}

/// Where a set of stage weights came from.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSource {
    /// The closed forms in terms of `μ`, `α`, `β`, `γ`, `ρ`.
    ClosedForm,
    /// Residues of the defining functions, used because these closed-form
    /// checks failed.
    Residue { failed: Vec<IdentityCheck> },
}

/// Auxiliary constants of the closed-form weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormConstants {
    pub mu: [f64; 4],
    pub moments: PoleMoments,
    /// Numerator constants of `P1` (three terms).
    pub p1: [f64; 3],
    /// Numerator constants of `P2` (three terms).
    pub p2: [f64; 3],
    /// Numerator constants of `P3` (four terms).
    pub p3: [f64; 4],
}

impl ClosedFormConstants {
    pub fn new(c: &RdpCoefficients) -> Self {
        let [a1, a2, a3] = c.a;
        let m = c.moments();
        let (al, be, ga, rho) = (m.alpha, m.beta, m.gamma, m.rho);
        Self {
            mu: [0.5 * (a1 - al), 0.25 * (a2 - be), 0.125 * (a3 - ga), -rho / 16.0],
            moments: m,
            p1: [
                4.0 * ga - be - a1 - 3.0 * a2 - 4.0 * a3,
                4.0 * rho - ga - a2 - 3.0 * a3,
                -rho - a3,
            ],
            p2: [-(2.0 * ga - be - (2.0 * a3 + a2)), -(2.0 * rho - ga - a3), rho],
            p3: [
                -(-4.0 * ga + 3.0 * be - al + (a2 + 4.0 * a3)),
                -(-4.0 * rho + 3.0 * ga - be + a3),
                -(3.0 * rho - ga),
                rho,
            ],
        }
    }
}

/// Partial-fraction weights for one step size `k`.
///
/// `w` propagates the state, `q` carries the nonlinear term in the three
/// half-step stages and `r`, `g`, `h` carry it in the full-step update:
///
/// ```text
/// aₙ   = Σ (I + bᵢkA/2)⁻¹ (wᵢUₙ + qᵢFₙ)
/// Uₙ₊₁ = Σ (I + bᵢkA)⁻¹  (wᵢUₙ + rᵢFₙ + 2gᵢ(Fₐ + F_b) + hᵢF_c)
/// ```
///
/// The closed form for the half-step weights produces `-qᵢ` and is paired
/// with a subtraction in the stage right-hand side; `q` is stored with the
/// sign that makes `Σqᵢ = k/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageWeights {
    pub k: f64,
    pub w: [f64; 4],
    pub q: [f64; 4],
    pub r: [f64; 4],
    pub g: [f64; 4],
    pub h: [f64; 4],
    pub constants: ClosedFormConstants,
    pub source: WeightSource,
}

fn pole_products(b: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).filter(|&j| j != i).map(|j| 1.0 - b[j] / b[i]).product())
}

impl StageWeights {
    /// Weights from the closed-form expressions, without validation.
    pub fn closed_form(c: &RdpCoefficients, k: f64) -> Self {
        let cf = ClosedFormConstants::new(c);
        let den = pole_products(&c.b);
        let [mu1, mu2, mu3, mu4] = cf.mu;
        let q = std::array::from_fn(|i| {
            let b = c.b[i];
            let printed = k * (mu1 - 2.0 * mu2 / b + 4.0 * mu3 / (b * b) - 8.0 * mu4 / (b * b * b)) / den[i];
            -printed
        });
        let r = std::array::from_fn(|i| {
            let b = c.b[i];
            (cf.p1[0] - cf.p1[1] / b + cf.p1[2] / (b * b)) * k / den[i]
        });
        let g = std::array::from_fn(|i| {
            let b = c.b[i];
            (cf.p2[0] - cf.p2[1] / b + cf.p2[2] / (b * b)) * k / den[i]
        });
        let h = std::array::from_fn(|i| {
            let b = c.b[i];
            (cf.p3[0] - cf.p3[1] / b + cf.p3[2] / (b * b) - cf.p3[3] / (b * b * b)) * k / den[i]
        });
        Self {
            k,
            w: c.w,
            q,
            r,
            g,
            h,
            constants: cf,
            source: WeightSource::ClosedForm,
        }
    }

    /// Weights as residues of the defining functions at each pole.
    ///
    /// Near `x = -1/bᵢ` the approximation behaves like `wᵢ/(1 + bᵢx)`, so each
    /// weight is `wᵢ` times the polynomial multiplying `R` in the defining
    /// function, divided by the remaining power of `x`.
    pub fn residue(c: &RdpCoefficients, k: f64) -> Self {
        let q = std::array::from_fn(|i| 0.5 * k * c.w[i] * c.b[i]);
        let r = std::array::from_fn(|i| {
            let b = c.b[i];
            k * c.w[i] * b * (1.0 + b * (-3.0 + 4.0 * b))
        });
        let g = std::array::from_fn(|i| {
            let b = c.b[i];
            k * c.w[i] * b * b * (1.0 - 2.0 * b)
        });
        let h = std::array::from_fn(|i| {
            let b = c.b[i];
            k * c.w[i] * b * b * (4.0 * b - 1.0)
        });
        Self {
            k,
            w: c.w,
            q,
            r,
            g,
            h,
            constants: ClosedFormConstants::new(c),
            source: WeightSource::Residue { failed: Vec::new() },
        }
    }

    pub fn family(&self, family: WeightFamily) -> &[f64; 4] {
        match family {
            WeightFamily::HalfStep => &self.q,
            WeightFamily::P1 => &self.r,
            WeightFamily::P2 => &self.g,
            WeightFamily::P3 => &self.h,
        }
    }

    /// Partial-fraction sum of a family at scalar `x = ka`, divided by `k`.
    pub fn partial_fraction_sum(&self, family: WeightFamily, x: f64) -> f64 {
        let scale = match family {
            WeightFamily::HalfStep => 0.5,
            _ => 1.0,
        };
        self.family(family)
            .iter()
            .zip(&RDP.b)
            .map(|(c, b)| c / (1.0 + scale * b * x))
            .sum::<f64>()
            / self.k
    }

    pub fn identity_checks(&self) -> Vec<IdentityCheck> {
        let families = [
            WeightFamily::HalfStep,
            WeightFamily::P1,
            WeightFamily::P2,
            WeightFamily::P3,
        ];
        families
            .iter()
            .flat_map(|&family| {
                IDENTITY_POINTS.iter().map(move |&x| {
                    let partial_fractions = self.partial_fraction_sum(family, x);
                    let defining = defining_function(family, x);
                    IdentityCheck {
                        family,
                        x,
                        partial_fractions,
                        defining,
                        relative_error: (partial_fractions - defining).abs() / defining.abs(),
                    }
                })
            })
            .collect()
    }

    /// `(Σq, Σr, Σg, Σh)`.
    pub fn sums(&self) -> [f64; 4] {
        [
            self.q.iter().sum(),
            self.r.iter().sum(),
            self.g.iter().sum(),
            self.h.iter().sum(),
        ]
    }
}

/// Closed-form weights for step `k`, replaced by the residue route if any
/// scalar identity fails.
pub fn stage_weights(k: f64) -> Result<StageWeights> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {k}")));
    }
    let closed = StageWeights::closed_form(&RDP, k);
    let failed: Vec<IdentityCheck> = closed.identity_checks().into_iter().filter(|c| !c.passed()).collect();
    if failed.is_empty() {
        return Ok(closed);
    }
    let mut fallback = StageWeights::residue(&RDP, k);
    fallback.source = WeightSource::Residue { failed };
    Ok(fallback)
}
