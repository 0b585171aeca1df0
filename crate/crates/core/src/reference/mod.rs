//! Reference time steppers: dense ETDRK4 with exact or rational propagators,
//! and the (2,2) Padé variant used for comparison.

mod dense;
mod etdrk4;
mod p22;

pub use dense::DenseMatrix;
pub use etdrk4::{
    etdrk4_exact_step, exponential_propagator, phi_functions, rational_propagator, DenseEtdrk4, Etdrk4Coefficients,
};
pub use p22::{p22_step, P22Workspace};
