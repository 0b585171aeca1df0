//! Joint refinement in k and h for the Dirichlet problem with a known solution.
//!
//! ```text
//! cargo run --release --example dirichlet_convergence -- [levels] [report.csv]
//! ```

use std::path::PathBuf;

use etdrk4rdp::harness::{run_convergence, write_report, RunConfig};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let mut args = std::env::args().skip(1);
    let levels = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let out = args.next().map(PathBuf::from);

    let cfg = RunConfig::new(ProblemKind::DirichletLinear);
    let report = run_convergence(&cfg, levels)?;
    println!(
        "{:>7} {:>4} {:>10} {:>11} {:>6} {:>8}",
        "k", "m", "h", "error", "order", "seconds"
    );
    for r in &report.rows {
        println!(
            "{:>7} {:>4} {:>10.6} {:>11.3e} {:>6} {:>8.2}",
            r.k,
            r.m,
            r.h,
            r.error.unwrap_or(f64::NAN),
            r.order.map_or_else(|| "-".to_string(), |p| format!("{p:.2}")),
            r.wall_seconds
        );
    }
    if let Some(path) = out {
        write_report(&report, Some(&cfg), &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
