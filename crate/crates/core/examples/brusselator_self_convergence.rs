//! Successive halving of k on a fixed grid for the two-species Brusselator.
//!
//! The defaults finish in a few seconds; `-- 79 4` reproduces the full study.

use etdrk4rdp::harness::{run_self_convergence, RunConfig};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let mut args = std::env::args().skip(1);
    let m = args.next().and_then(|s| s.parse().ok()).unwrap_or(39);
    let levels = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let cfg = RunConfig::new(ProblemKind::Brusselator)
        .with_m(m)
        .with_k(0.05)
        .with_t_final(2.0);
    let report = run_self_convergence(&cfg, levels)?;
    println!("brusselator, m = {m}, h = {}", report.rows[0].h);
    for r in &report.rows {
        let order = r.order.map_or_else(|| "-".to_string(), |p| format!("{p:.2}"));
        println!(
            "  k = {:<8} |U(k) - U(k/2)| = {:.3e}  order {order}",
            r.k,
            r.error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
