//! Initial data that violate the boundary condition, stepped with an L-stable
//! and an A-stable rational function.

use etdrk4rdp::harness::{run_damping_demo_until, Scheme};

fn main() -> etdrk4rdp::Result<()> {
    let mut args = std::env::args().skip(1);
    let m = args.next().and_then(|s| s.parse().ok()).unwrap_or(19);
    let k = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let report = run_damping_demo_until(m, k, 1.0)?;
    println!(
        "m = {}, h = {}, k = {}, initial max {}",
        report.m, report.h, report.k, report.initial_max
    );
    for scheme in [Scheme::Rdp, Scheme::P22] {
        let run = report.scheme(scheme).expect("both schemes run");
        println!("{scheme}");
        println!(
            "  {:>4} {:>6} {:>11} {:>11} {:>11}",
            "step", "t", "min", "max", "midline d2"
        );
        for m in run.history.iter().take(5).chain(run.history.last()) {
            println!(
                "  {:>4} {:>6.3} {:>11.3e} {:>11.3e} {:>11.3e}",
                m.step, m.t, m.min, m.max, m.midline_second_difference
            );
        }
    }
    if let Some(r) = report.first_step_ratio() {
        println!("first-step midline oscillation, p22 / rdp = {r:.1}");
    }
    Ok(())
}
