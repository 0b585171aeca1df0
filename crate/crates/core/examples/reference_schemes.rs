//! The sparse stepper next to dense exact-exponential ETDRK4 and the Padé(2,2) variant.

use etdrk4rdp::harness::{linf_error, solve, RunConfig, Scheme};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let base = RunConfig::new(ProblemKind::DirichletLinear).with_m(15);
    for k in [0.2, 0.1, 0.05] {
        let run = |s| solve(&base.clone().with_k(k).with_scheme(s));
        let exact = run(Scheme::ExactRef)?;
        let rdp = run(Scheme::Rdp)?;
        let p22 = run(Scheme::P22)?;
        println!(
            "k = {k:<5} |rdp - exact| = {:.2e}  |p22 - exact| = {:.2e}  error vs PDE: {:.2e}",
            linf_error(&rdp.final_state.u, &exact.final_state.u)?,
            linf_error(&p22.final_state.u, &exact.final_state.u)?,
            rdp.error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
