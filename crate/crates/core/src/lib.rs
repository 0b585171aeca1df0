//! Fourth-order exponential time differencing (ETDRK4) for two-dimensional
//! reaction-diffusion systems, with every matrix exponential replaced by an
//! L-stable rational function that has four real distinct poles.
//!
//! A step costs sixteen sparse linear solves against eight matrices that are
//! factored once per `(A, k)` pair. The solves inside each stage are
//! independent and can run concurrently.
//!
//! ```
//! use etdrk4rdp::harness::linf_error;
//! use etdrk4rdp::problems::make_problem;
//! use etdrk4rdp::stepper::{integrate, StepperWorkspace};
//!
//! let problem = make_problem("dirichlet-linear", 15).unwrap();
//! let ws = StepperWorkspace::setup(&problem.matrix, 0.1).unwrap();
//! let end = integrate(&ws, problem.initial_state(), 1.0, &problem, |_, _| {}).unwrap();
//! let exact = problem.exact_on_grid(1.0).unwrap();
//! assert!(linf_error(&end.u, &exact).unwrap() < 1e-3);
//! ```

pub mod discretization;
pub mod error;
pub mod harness;
pub mod problems;
pub mod rational;
pub mod reference;
pub mod sparse;
pub mod stepper;

pub use error::{Error, Result};
pub use sparse::{Factorization, SparseMatrix};
pub use stepper::{integrate, Reaction, State, StepperWorkspace, TimeStepper};
