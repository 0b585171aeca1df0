//! A reaction-diffusion system that is not built in: Fisher-KPP on the unit
//! square with no-flux walls, written against the library pieces directly.

use etdrk4rdp::discretization::{assemble_system_matrix, BoundaryKind, Grid1D};
use etdrk4rdp::stepper::{integrate, State, StepperWorkspace};

fn main() -> etdrk4rdp::Result<()> {
    let g = Grid1D::new(0.0, 1.0, 49)?;
    let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousNeumann, &[1e-3])?;
    let nodes = g.unknown_nodes(BoundaryKind::HomogeneousNeumann);
    let p = nodes.len();

    let mut u0 = Vec::with_capacity(p * p);
    for &y in &nodes {
        for &x in &nodes {
            let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
            u0.push((-r2 / 0.01).exp());
        }
    }
    let fisher = |u: &[f64], _t: f64, out: &mut [f64]| {
        for (o, v) in out.iter_mut().zip(u) {
            *o = 5.0 * v * (1.0 - v);
        }
    };

    let ws = StepperWorkspace::setup_with_workers(&a, 0.05, 4)?;
    let mass = |u: &[f64]| u.iter().sum::<f64>() / u.len() as f64;
    let end = integrate(&ws, State::new(u0, 0.0), 3.0, &fisher, |i, s| {
        if i % 10 == 0 {
            let max = s.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            println!("t = {:>4.2}  mean {:.4}  max {:.4}", s.t, mass(&s.u), max);
        }
    })?;
    println!("{} steps, final mean {:.4}", end.steps, mass(&end.u));
    Ok(())
}
