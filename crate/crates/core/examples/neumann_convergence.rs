//! The Neumann problem: a singular diffusion matrix, regular shifted solves.

use etdrk4rdp::harness::{run_convergence, RunConfig, Scheme};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let levels = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    for scheme in [Scheme::Rdp, Scheme::P22] {
        let cfg = RunConfig::new(ProblemKind::NeumannLinear).with_scheme(scheme);
        let report = run_convergence(&cfg, levels)?;
        println!("{scheme}");
        for r in &report.rows {
            let order = r.order.map_or_else(|| "-".to_string(), |p| format!("{p:.2}"));
            println!(
                "  k = {:<6} m = {:<4} error = {:.3e}  order {order}",
                r.k,
                r.m,
                r.error.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
