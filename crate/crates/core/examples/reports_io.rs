//! A study written as CSV plus JSON sidecar, read back, and snapshot grids.

use etdrk4rdp::harness::{read_report_csv, run_convergence, sidecar_path, solve, write_report, write_solve, RunConfig};
use etdrk4rdp::problems::ProblemKind;

fn main() -> etdrk4rdp::Result<()> {
    let dir = std::env::temp_dir().join("etdrk4rdp-reports");
    let cfg = RunConfig::new(ProblemKind::DirichletLinear).with_m(19).with_k(0.2);
    let report = run_convergence(&cfg, 3)?;
    let csv = dir.join("dirichlet.csv");
    write_report(&report, Some(&cfg), &csv)?;
    println!("{}", std::fs::read_to_string(&csv).expect("just written"));
    println!("sidecar: {}", sidecar_path(&csv).display());
    for row in read_report_csv(&csv)? {
        println!("parsed {row:?}");
    }

    let mut cfg = RunConfig::new(ProblemKind::Brusselator).with_m(19).with_t_final(0.5);
    cfg.snapshot_at = vec![0.0, 0.25, 0.5];
    let out = solve(&cfg)?;
    for path in write_solve(&out, &cfg, &dir.join("brusselator.json"))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
