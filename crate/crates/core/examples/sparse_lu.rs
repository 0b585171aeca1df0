//! Factor a shifted 2D Laplacian once and reuse it for many right-hand sides.

use std::time::Instant;

use etdrk4rdp::discretization::{assemble_system_matrix, BoundaryKind, Grid1D};
use etdrk4rdp::harness::linf_error;
use etdrk4rdp::{Factorization, SparseMatrix};

fn main() -> etdrk4rdp::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(99);
    let g = Grid1D::new(0.0, 1.0, m)?;
    let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousDirichlet, &[1.0])?;
    let shifted = SparseMatrix::add_scaled(&SparseMatrix::identity(a.nrows()), &a, 1.0, 0.05)?;

    let clock = Instant::now();
    let lu = Factorization::new(&shifted)?;
    println!(
        "n = {}, nnz(A) = {}, factor entries = {}, factored in {:.3} s",
        lu.dim(),
        shifted.nnz(),
        lu.fill(),
        clock.elapsed().as_secs_f64()
    );

    for seed in 0..3 {
        let b: Vec<f64> = (0..lu.dim()).map(|i| ((i * 7 + seed * 13) % 11) as f64 - 5.0).collect();
        let x = lu.solve(&b)?;
        let residual = linf_error(&shifted.matvec(&x)?, &b)?;
        println!("rhs {seed}: residual {residual:.2e}");
    }
    Ok(())
}
