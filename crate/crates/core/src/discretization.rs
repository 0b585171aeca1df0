//! Fourth-order finite-difference Laplacians and 2D system assembly.
//!
//! The 1D matrices approximate `+d²/dx²`. [`assemble_system_matrix`] flips the
//! sign so that the semi-discrete system reads `dU/dt + A U = F(U, t)` with
//! `A ≈ -DΔ` positive semi-definite in direction.
//!
//! Unknown layout on a `p × p` grid is `iy * p + ix` (x fastest), species-major
//! for multi-species systems.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

pub const MIN_INTERIOR_POINTS: usize = 5;

/// Uniform mesh `x_j = a + j h`, `j = 0..=m+1`, with `h = (b - a) / (m + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    m: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if m < MIN_INTERIOR_POINTS {
            return Err(Error::GridTooSmall(m));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidGrid(format!("interval ({a}, {b}) is empty")));
        }
        Ok(Self {
            a,
            b,
            m,
            h: (b - a) / (m + 1) as f64,
        })
    }

    /// Grid whose spacing is closest to a nominal `h`.
    pub fn nearest(a: f64, b: f64, nominal_h: f64) -> Result<Self> {
        if !(nominal_h > 0.0 && nominal_h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {nominal_h} is not positive")));
        }
        let cells = ((b - a) / nominal_h).round().max(1.0) as usize;
        Self::new(a, b, cells.saturating_sub(1))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Interior point count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h
    }

    /// Coordinates of the unknowns for a boundary kind.
    pub fn unknown_nodes(&self, bc: BoundaryKind) -> Vec<f64> {
        match bc {
            BoundaryKind::HomogeneousDirichlet => (1..=self.m).map(|j| self.node(j)).collect(),
            BoundaryKind::HomogeneousNeumann => (0..=self.m + 1).map(|j| self.node(j)).collect(),
        }
    }

    pub fn unknowns(&self, bc: BoundaryKind) -> usize {
        match bc {
            BoundaryKind::HomogeneousDirichlet => self.m,
            BoundaryKind::HomogeneousNeumann => self.m + 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BoundaryKind {
    HomogeneousDirichlet,
    HomogeneousNeumann,
}

const INTERIOR: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

fn stencil_rows(n: usize, rows: &[(usize, usize, &[f64])], scale: f64) -> Result<SparseMatrix> {
    let mut t = Vec::with_capacity(5 * n);
    for &(row, first_col, coeffs) in rows {
        for (c, &v) in coeffs.iter().enumerate() {
            t.push((row, first_col + c, v * scale));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

/// `m × m` matrix over interior nodes; boundary values are zero.
///
/// Rows next to the boundary use the one-sided extrapolated stencil
/// `(11, -20, 6, 4, -1)` with the boundary term dropped.
pub fn laplacian_1d_dirichlet(g: &Grid1D) -> Result<SparseMatrix> {
    let m = g.m;
    if m < MIN_INTERIOR_POINTS {
        return Err(Error::GridTooSmall(m));
    }
    const NEAR: [f64; 4] = [-20.0, 6.0, 4.0, -1.0];
    const NEAR_MIRROR: [f64; 4] = [-1.0, 4.0, 6.0, -20.0];
    // rows 1 and m-2 reach the boundary node, which carries zero
    let mut rows: Vec<(usize, usize, &[f64])> = vec![(0, 0, &NEAR), (1, 0, &INTERIOR[1..])];
    rows.extend((2..m - 2).map(|r| (r, r - 2, &INTERIOR[..])));
    rows.push((m - 2, m - 4, &INTERIOR[..4]));
    rows.push((m - 1, m - 4, &NEAR_MIRROR));
    stencil_rows(m, &rows, 1.0 / (12.0 * g.h * g.h))
}

/// `(m+2) × (m+2)` matrix over all nodes, ghost values eliminated by symmetry.
pub fn laplacian_1d_neumann(g: &Grid1D) -> Result<SparseMatrix> {
    let m = g.m;
    if m < MIN_INTERIOR_POINTS {
        return Err(Error::GridTooSmall(m));
    }
    let n = m + 2;
    const EDGE: [f64; 3] = [-30.0, 32.0, -2.0];
    const EDGE_MIRROR: [f64; 3] = [-2.0, 32.0, -30.0];
    const NEXT: [f64; 4] = [16.0, -31.0, 16.0, -1.0];
    const NEXT_MIRROR: [f64; 4] = [-1.0, 16.0, -31.0, 16.0];
    let mut rows: Vec<(usize, usize, &[f64])> = vec![(0, 0, &EDGE), (1, 0, &NEXT)];
    rows.extend((2..n - 2).map(|r| (r, r - 2, &INTERIOR[..])));
    rows.push((n - 2, n - 4, &NEXT_MIRROR));
    rows.push((n - 1, n - 3, &EDGE_MIRROR));
    stencil_rows(n, &rows, 1.0 / (12.0 * g.h * g.h))
}

pub fn laplacian_1d(g: &Grid1D, bc: BoundaryKind) -> Result<SparseMatrix> {
    match bc {
        BoundaryKind::HomogeneousDirichlet => laplacian_1d_dirichlet(g),
        BoundaryKind::HomogeneousNeumann => laplacian_1d_neumann(g),
    }
}

/// Kronecker terms `(B ⊗ I, I ⊗ B)` of the 2D Laplacian for one species.
pub fn kronecker_terms(b: &SparseMatrix) -> (SparseMatrix, SparseMatrix) {
    let id = SparseMatrix::identity(b.nrows());
    (b.kron(&id), id.kron(b))
}

/// Block-diagonal `A = diag_s(-d_s (B ⊗ I + I ⊗ B))` of dimension `s·p²`.
pub fn assemble_system_matrix(gx: &Grid1D, gy: &Grid1D, bc: BoundaryKind, diffusion: &[f64]) -> Result<SparseMatrix> {
    if gx.m != gy.m || (gx.h - gy.h).abs() > 1e-14 * gx.h.max(gy.h) {
        return Err(Error::InvalidGrid(format!(
            "x grid (m = {}, h = {}) and y grid (m = {}, h = {}) differ",
            gx.m, gx.h, gy.m, gy.h
        )));
    }
    if diffusion.is_empty() {
        return Err(Error::InvalidArgument("at least one species is required".into()));
    }
    if let Some(&d) = diffusion.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::NonPositiveDiffusion(d));
    }
    let b = laplacian_1d(gx, bc)?;
    let (a1, a2) = kronecker_terms(&b);
    let lap = SparseMatrix::add_scaled(&a1, &a2, 1.0, 1.0)?;
    let blocks: Vec<SparseMatrix> = diffusion.iter().map(|&d| lap.scaled(-d)).collect();
    Ok(SparseMatrix::block_diag(&blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn row(m: &SparseMatrix, i: usize) -> Vec<f64> {
        (0..m.ncols()).map(|j| m.get(i, j)).collect()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_spacing() {
        let g = Grid1D::new(0.0, 1.0, 19).unwrap();
        assert_eq!(g.h(), 0.05);
        assert!(matches!(Grid1D::new(0.0, 1.0, 4), Err(Error::GridTooSmall(4))));
        let near = Grid1D::nearest(-PI / 2.0, PI / 2.0, 0.08).unwrap();
        assert_eq!(near.m(), 38);
    }

    #[test]
    fn dirichlet_rows() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        let b = laplacian_1d_dirichlet(&g).unwrap();
        let s = 12.0 * g.h() * g.h();
        let r2: Vec<f64> = row(&b, 2).iter().map(|v| v * s).collect();
        assert!(max_abs_diff(&r2, &[-1.0, 16.0, -30.0, 16.0, -1.0]) < 1e-12);
        let r0: Vec<f64> = row(&b, 0).iter().map(|v| v * s).collect();
        assert!(max_abs_diff(&r0, &[-20.0, 6.0, 4.0, -1.0, 0.0]) < 1e-12);
        let r4: Vec<f64> = row(&b, 4).iter().map(|v| v * s).collect();
        assert!(max_abs_diff(&r4, &[0.0, -1.0, 4.0, 6.0, -20.0]) < 1e-12);
        let r1: Vec<f64> = row(&b, 1).iter().map(|v| v * s).collect();
        assert!(max_abs_diff(&r1, &[16.0, -30.0, 16.0, -1.0, 0.0]) < 1e-12);
    }

    #[test]
    fn neumann_rows() {
        let g = Grid1D::new(0.0, 1.0, 6).unwrap();
        let b = laplacian_1d_neumann(&g).unwrap();
        let s = 12.0 * g.h() * g.h();
        let scaled = |i| row(&b, i).iter().map(|v| v * s).collect::<Vec<f64>>();
        assert!(max_abs_diff(&scaled(0)[..3], &[-30.0, 32.0, -2.0]) < 1e-12);
        assert!(max_abs_diff(&scaled(1)[..4], &[16.0, -31.0, 16.0, -1.0]) < 1e-12);
        assert!(max_abs_diff(&scaled(6)[4..], &[-1.0, 16.0, -31.0, 16.0]) < 1e-12);
        assert!(max_abs_diff(&scaled(7)[5..], &[-2.0, 32.0, -30.0]) < 1e-12);
        for sum in b.row_sums() {
            assert!(sum.abs() <= 1e-12 * b.norm_inf().max(1.0));
        }
    }

    fn second_derivative_residual(
        bc: BoundaryKind,
        a: f64,
        b: f64,
        m: usize,
        f: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
    ) -> Vec<f64> {
        let g = Grid1D::new(a, b, m).unwrap();
        let lap = laplacian_1d(&g, bc).unwrap();
        let x = g.unknown_nodes(bc);
        let s: Vec<f64> = x.iter().map(|&x| f(x)).collect();
        let lhs = lap.matvec(&s).unwrap();
        lhs.iter().zip(&x).map(|(l, &x)| l - f2(x)).collect()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn second_derivative_error(
        bc: BoundaryKind,
        a: f64,
        b: f64,
        m: usize,
        f: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
    ) -> f64 {
        max_abs(&second_derivative_residual(bc, a, b, m, f, f2))
    }

    #[test]
    fn dirichlet_refinement_ratio_on_sine() {
        let res =
            |m| second_derivative_residual(BoundaryKind::HomogeneousDirichlet, 0.0, PI, m, f64::sin, |x| -x.sin());
        let (r40, r80) = (res(40), res(80));
        // rows away from the boundary are fourth order
        let ratio = max_abs(&r40[1..39]) / max_abs(&r80[1..79]);
        assert!((14.0..18.0).contains(&ratio), "interior ratio {ratio}");
        // the one-sided rows carry -h³f⁽⁵⁾/12
        for (r, m) in [(&r40, 40), (&r80, 80)] {
            let h = PI / (m + 1) as f64;
            let predicted = -h.powi(3) * h.cos() / 12.0;
            assert!(
                (r[0] / predicted - 1.0).abs() < 0.05,
                "m = {m}: {} vs {predicted}",
                r[0]
            );
            assert!((r[m - 1] / predicted - 1.0).abs() < 0.05);
        }
        let ratio = max_abs(&r40) / max_abs(&r80);
        assert!((7.0..9.0).contains(&ratio), "overall ratio {ratio}");
    }

    #[test]
    fn kronecker_sum_of_quadratic() {
        let g = Grid1D::new(-1.0, 1.0, 7).unwrap();
        let b = laplacian_1d_neumann(&g).unwrap();
        let (a1, a2) = kronecker_terms(&b);
        let lap = SparseMatrix::add_scaled(&a1, &a2, 1.0, 1.0).unwrap();
        let x = g.unknown_nodes(BoundaryKind::HomogeneousNeumann);
        let p = x.len();
        let mut u = vec![0.0; p * p];
        for iy in 0..p {
            for ix in 0..p {
                u[iy * p + ix] = x[ix] * x[ix] + x[iy] * x[iy];
            }
        }
        let out = lap.matvec(&u).unwrap();
        // the centred stencil is exact on quadratics; rows touching the
        // reflected boundary see a ghost value inconsistent with x²
        for iy in 2..p - 2 {
            for ix in 2..p - 2 {
                assert!((out[iy * p + ix] - 4.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn smallest_dirichlet_eigenvalue() {
        let g = Grid1D::new(-PI / 2.0, PI / 2.0, 40).unwrap();
        let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousDirichlet, &[1.0]).unwrap();
        let lu = crate::sparse::Factorization::new(&a).unwrap();
        let mut v = vec![1.0; a.nrows()];
        let mut lambda = 0.0;
        for _ in 0..50 {
            let w = lu.solve(&v).unwrap();
            let norm = max_abs(&w);
            lambda = max_abs(&v) / norm;
            v = w.iter().map(|x| x / norm).collect();
        }
        assert!((lambda - 2.0).abs() < 1e-3, "lambda {lambda}");
    }

    #[test]
    fn neumann_refinement_ratio_on_cosine() {
        let e40 = second_derivative_error(BoundaryKind::HomogeneousNeumann, -PI, PI, 40, f64::cos, |x| -x.cos());
        let e80 = second_derivative_error(BoundaryKind::HomogeneousNeumann, -PI, PI, 80, f64::cos, |x| -x.cos());
        let ratio = e40 / e80;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn neumann_system_annihilates_constants() {
        let g = Grid1D::new(0.0, 1.0, 9).unwrap();
        let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousNeumann, &[1.0]).unwrap();
        assert_eq!(a.nrows(), 121);
        let out = a.matvec(&vec![1.0; 121]).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn two_species_are_decoupled_blocks() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousDirichlet, &[1.0, 0.5]).unwrap();
        let one = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousDirichlet, &[1.0]).unwrap();
        assert_eq!(a.nrows(), 50);
        assert!(a.triplets().all(|(i, j, _)| (i < 25) == (j < 25)));
        for (i, j, v) in one.triplets() {
            assert_eq!(a.get(i, j), v);
            assert!((a.get(i + 25, j + 25) - 0.5 * v).abs() < 1e-12 * v.abs());
        }
    }

    #[test]
    fn system_matrix_is_negated_kronecker_sum() {
        let g = Grid1D::new(-1.0, 2.0, 7).unwrap();
        let a = assemble_system_matrix(&g, &g, BoundaryKind::HomogeneousNeumann, &[1.0]).unwrap();
        let b = laplacian_1d_neumann(&g).unwrap();
        let (a1, a2) = kronecker_terms(&b);
        let u: Vec<f64> = (0..81).map(|i| (i as f64 * 0.37).sin()).collect();
        let lhs = a.matvec(&u).unwrap();
        let r1 = a1.matvec(&u).unwrap();
        let r2 = a2.matvec(&u).unwrap();
        for i in 0..81 {
            assert!((lhs[i] + r1[i] + r2[i]).abs() < 1e-10 * (1.0 + lhs[i].abs()));
        }
    }

    #[test]
    fn assembly_errors() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        let g2 = Grid1D::new(0.0, 1.0, 6).unwrap();
        let dir = BoundaryKind::HomogeneousDirichlet;
        assert!(matches!(
            assemble_system_matrix(&g, &g, dir, &[0.0]),
            Err(Error::NonPositiveDiffusion(_))
        ));
        assert!(assemble_system_matrix(&g, &g2, dir, &[1.0]).is_err());
    }
}
