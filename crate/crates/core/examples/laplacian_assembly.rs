//! Fourth-order Laplacians with Dirichlet and Neumann closures, and their accuracy.

use std::f64::consts::PI;

use etdrk4rdp::discretization::{laplacian_1d, BoundaryKind, Grid1D};

fn max_error(bc: BoundaryKind, a: f64, b: f64, m: usize, f: fn(f64) -> f64, f2: fn(f64) -> f64) -> f64 {
    let g = Grid1D::new(a, b, m).unwrap();
    let lap = laplacian_1d(&g, bc).unwrap();
    let nodes = g.unknown_nodes(bc);
    let u: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let lu = lap.matvec(&u).unwrap();
    nodes
        .iter()
        .zip(lu)
        .map(|(&x, v)| (v - f2(x)).abs())
        .fold(0.0, f64::max)
}

fn main() {
    let g = Grid1D::new(0.0, 1.0, 7).unwrap();
    let lap = laplacian_1d(&g, BoundaryKind::HomogeneousDirichlet).unwrap();
    let scale = 12.0 * g.h() * g.h();
    println!("Dirichlet rows times 12h^2, m = 7:");
    for i in 0..g.m() {
        let row: Vec<String> = (0..g.m()).map(|j| format!("{:>5}", lap.get(i, j) * scale)).collect();
        println!("  {}", row.join(""));
    }

    println!();
    println!(
        "{:>5} {:>12} {:>7} {:>12} {:>7}",
        "m", "dirichlet", "ratio", "neumann", "ratio"
    );
    let mut last: Option<(f64, f64)> = None;
    for m in [19, 39, 79, 159] {
        let d = max_error(
            BoundaryKind::HomogeneousDirichlet,
            -PI / 2.0,
            PI / 2.0,
            m,
            f64::cos,
            |x| -x.cos(),
        );
        let n = max_error(BoundaryKind::HomogeneousNeumann, -PI, PI, m, f64::cos, |x| -x.cos());
        let (rd, rn) = last.map_or((f64::NAN, f64::NAN), |(pd, pn)| (pd / d, pn / n));
        println!("{m:>5} {d:>12.3e} {rd:>7.2} {n:>12.3e} {rn:>7.2}");
        last = Some((d, n));
    }
}
