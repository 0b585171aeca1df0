//! Stepping time and bitwise agreement for several worker counts.

use etdrk4rdp::harness::{bench, RunConfig};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let m = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(79);
    let cfg = RunConfig::new(ProblemKind::Brusselator)
        .with_m(m)
        .with_k(0.05)
        .with_t_final(0.5);
    let r = bench(&cfg, &[1, 2, 4])?;
    println!(
        "{} unknowns, {} factor entries, setup {:.2} s, {} cores",
        r.unknowns, r.factor_entries, r.setup_seconds, r.available_parallelism
    );
    for e in &r.entries {
        println!(
            "  workers {}: {:.3} s, speedup {:.2}, deviation {:.1e}",
            e.workers, e.step_seconds, e.speedup, e.deviation
        );
    }
    Ok(())
}
