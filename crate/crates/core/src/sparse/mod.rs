//! Compressed-sparse-column matrices and a direct LU solver.
//!
//! Matrices are canonical after construction: row indices inside each column
//! are strictly increasing and there are no duplicate entries. Explicit zeros
//! may be stored (they arise from cancellation in [`SparseMatrix::add_scaled`]).

mod lu;
mod ordering;

pub use lu::Factorization;
pub use ordering::nested_dissection;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; ncols + 1];
        for &(row, col, _) in entries {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfRange { row, col, nrows, ncols });
            }
            counts[col + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rows = vec![0usize; entries.len()];
        let mut vals = vec![0.0; entries.len()];
        for &(row, col, value) in entries {
            let slot = next[col];
            rows[slot] = row;
            vals[slot] = value;
            next[col] += 1;
        }

        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        col_ptr.push(0);
        let mut column: Vec<(usize, f64)> = Vec::new();
        for j in 0..ncols {
            column.clear();
            column.extend((counts[j]..counts[j + 1]).map(|p| (rows[p], vals[p])));
            column.sort_by_key(|&(r, _)| r);
            for &(r, v) in &column {
                if row_idx.len() > col_ptr[j] && *row_idx.last().unwrap() == r {
                    *values.last_mut().unwrap() += v;
                } else {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Dense row-major input, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                op: "from_dense",
                expected: nrows * ncols,
                found: data.len(),
            });
        }
        let entries: Vec<_> = (0..nrows)
            .flat_map(|i| (0..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| data[i * ncols + j] != 0.0)
            .map(|(i, j)| (i, j, data[i * ncols + j]))
            .collect();
        Self::from_triplets(nrows, ncols, &entries)
    }

    /// Builds from already canonical CSC arrays.
    pub(crate) fn from_parts(
        nrows: usize,
        ncols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(col_ptr.len(), ncols + 1);
        debug_assert_eq!(*col_ptr.last().unwrap(), row_idx.len());
        debug_assert!((0..ncols).all(|j| row_idx[col_ptr[j]..col_ptr[j + 1]].windows(2).all(|w| w[0] < w[1])));
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    /// Stored value at `(i, j)`, zero if structurally absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (rows, vals) = self.column(j);
        match rows.binary_search(&i) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows * self.ncols];
        for (i, j, v) in self.triplets() {
            out[i * self.ncols + j] = v;
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::with_capacity(self.nnz() * other.nnz());
        let mut values = Vec::with_capacity(self.nnz() * other.nnz());
        col_ptr.push(0);
        for jl in 0..self.ncols {
            let (lrows, lvals) = self.column(jl);
            for jr in 0..other.ncols {
                let (rrows, rvals) = other.column(jr);
                for (&il, &vl) in lrows.iter().zip(lvals) {
                    for (&ir, &vr) in rrows.iter().zip(rvals) {
                        row_idx.push(il * other.nrows + ir);
                        values.push(vl * vr);
                    }
                }
                col_ptr.push(row_idx.len());
            }
        }
        SparseMatrix::from_parts(nrows, ncols, col_ptr, row_idx, values)
    }

    /// Returns `alpha * x + beta * y` over the union of both patterns.
    pub fn add_scaled(x: &SparseMatrix, y: &SparseMatrix, alpha: f64, beta: f64) -> Result<Self> {
        if x.nrows != y.nrows {
            return Err(Error::DimensionMismatch {
                op: "add_scaled rows",
                expected: x.nrows,
                found: y.nrows,
            });
        }
        if x.ncols != y.ncols {
            return Err(Error::DimensionMismatch {
                op: "add_scaled cols",
                expected: x.ncols,
                found: y.ncols,
            });
        }
        let mut col_ptr = Vec::with_capacity(x.ncols + 1);
        let mut row_idx = Vec::with_capacity(x.nnz() + y.nnz());
        let mut values = Vec::with_capacity(x.nnz() + y.nnz());
        col_ptr.push(0);
        for j in 0..x.ncols {
            let (xr, xv) = x.column(j);
            let (yr, yv) = y.column(j);
            let (mut p, mut q) = (0, 0);
            while p < xr.len() || q < yr.len() {
                let take_x = q >= yr.len() || (p < xr.len() && xr[p] <= yr[q]);
                let take_y = p >= xr.len() || (q < yr.len() && yr[q] <= xr[p]);
                match (take_x, take_y) {
                    (true, true) => {
                        row_idx.push(xr[p]);
                        values.push(alpha * xv[p] + beta * yv[q]);
                        p += 1;
                        q += 1;
                    }
                    (true, false) => {
                        row_idx.push(xr[p]);
                        values.push(alpha * xv[p]);
                        p += 1;
                    }
                    _ => {
                        row_idx.push(yr[q]);
                        values.push(beta * yv[q]);
                        q += 1;
                    }
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseMatrix::from_parts(x.nrows, x.ncols, col_ptr, row_idx, values))
    }

    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                op: "matvec input",
                expected: self.ncols,
                found: x.len(),
            });
        }
        if y.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "matvec output",
                expected: self.nrows,
                found: y.len(),
            });
        }
        y.fill(0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * xj;
            }
        }
        Ok(())
    }

    /// Sparse product `self * other` (Gustavson's algorithm).
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut col_ptr = Vec::with_capacity(other.ncols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut mark = vec![usize::MAX; self.nrows];
        let mut acc = vec![0.0; self.nrows];
        let mut pattern = Vec::new();
        col_ptr.push(0);
        for j in 0..other.ncols {
            pattern.clear();
            let (brows, bvals) = other.column(j);
            for (&k, &bkj) in brows.iter().zip(bvals) {
                let (arows, avals) = self.column(k);
                for (&i, &aik) in arows.iter().zip(avals) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = 0.0;
                        pattern.push(i);
                    }
                    acc[i] += aik * bkj;
                }
            }
            pattern.sort_unstable();
            for &i in &pattern {
                row_idx.push(i);
                values.push(acc[i]);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseMatrix::from_parts(
            self.nrows,
            other.ncols,
            col_ptr,
            row_idx,
            values,
        ))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.nrows + 1];
        for &i in &self.row_idx {
            counts[i + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.triplets() {
            let slot = next[i];
            row_idx[slot] = j;
            values[slot] = v;
            next[i] += 1;
        }
        SparseMatrix::from_parts(self.ncols, self.nrows, counts, row_idx, values)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0; self.nrows];
        for (i, _, v) in self.triplets() {
            sums[i] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.nrows];
        for (i, _, v) in self.triplets() {
            sums[i] += v;
        }
        sums
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diag(blocks: &[SparseMatrix]) -> SparseMatrix {
        let nrows = blocks.iter().map(|b| b.nrows).sum();
        let ncols = blocks.iter().map(|b| b.ncols).sum();
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::with_capacity(blocks.iter().map(|b| b.nnz()).sum());
        let mut values = Vec::with_capacity(row_idx.capacity());
        col_ptr.push(0);
        let mut row_off = 0;
        for b in blocks {
            for j in 0..b.ncols {
                let (rows, vals) = b.column(j);
                row_idx.extend(rows.iter().map(|&i| i + row_off));
                values.extend_from_slice(vals);
                col_ptr.push(row_idx.len());
            }
            row_off += b.nrows;
        }
        SparseMatrix::from_parts(nrows, ncols, col_ptr, row_idx, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn second_difference(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, -2.0));
            if i > 0 {
                t.push((i, i - 1, 1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, 1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn triplets_build_identity() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(m, SparseMatrix::identity(2));
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 2, .. }));
    }

    #[test]
    fn second_difference_is_tridiagonal() {
        let m = second_difference(3);
        assert_eq!(m.to_dense(), vec![-2.0, 1.0, 0.0, 1.0, -2.0, 1.0, 0.0, 1.0, -2.0]);
        assert_eq!(m.row_sums(), vec![-1.0, 0.0, -1.0]);
    }

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let m = SparseMatrix::from_dense(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let k = SparseMatrix::identity(2).kron(&m);
        assert_eq!(k, SparseMatrix::block_diag(&[m.clone(), m]));
    }

    #[test]
    fn kron_single_entry_places_block() {
        let e = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        let k = e.kron(&SparseMatrix::identity(2));
        let mut expected = vec![0.0; 16];
        expected[2] = 1.0;
        expected[4 + 3] = 1.0;
        assert_eq!(k.to_dense(), expected);
    }

    #[test]
    fn kron_sum_laplacian_of_quadratic() {
        // Second differences are exact on quadratics, so interior rows give 4.
        let n = 3;
        let h = 0.25;
        let b = second_difference(n).scaled(1.0 / (h * h));
        let id = SparseMatrix::identity(n);
        let lap = SparseMatrix::add_scaled(&b.kron(&id), &id.kron(&b), 1.0, 1.0).unwrap();
        let mut samples = Vec::new();
        let mut dense_oracle = vec![0.0; n * n];
        let f = |x: f64, y: f64| x * x + y * y;
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = ((ix + 1) as f64 * h, (iy + 1) as f64 * h);
                samples.push(f(x, y));
                // dense evaluation with the boundary values included
                dense_oracle[iy * n + ix] =
                    (f(x - h, y) + f(x + h, y) + f(x, y - h) + f(x, y + h) - 4.0 * f(x, y)) / (h * h);
            }
        }
        let out = lap.matvec(&samples).unwrap();
        // only the centre node has all neighbours inside the unknown set
        let centre = n + 1;
        assert!((out[centre] - 4.0).abs() < 1e-12);
        assert!((dense_oracle[centre] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn add_scaled_cases() {
        let a = second_difference(4);
        let id = SparseMatrix::identity(4);
        let same = SparseMatrix::add_scaled(&id, &a, 1.0, 0.0).unwrap();
        assert_eq!(same.to_dense(), id.to_dense());
        let twice = SparseMatrix::add_scaled(&id, &id, 1.0, 1.0).unwrap();
        assert_eq!(twice, SparseMatrix::diagonal(&[2.0; 4]));

        let shift = 0.4751834017787114 * 0.1;
        let m = SparseMatrix::add_scaled(&id, &a, 1.0, shift).unwrap();
        for (d, da) in m.diag().iter().zip(a.diag()) {
            assert!((d - (1.0 + 0.04751834017787114 * da)).abs() < 1e-15);
        }
    }

    #[test]
    fn add_scaled_rejects_mismatch() {
        let err = SparseMatrix::add_scaled(&SparseMatrix::identity(2), &SparseMatrix::identity(3), 1.0, 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn matvec_trivial_cases() {
        let x = [1.0, -2.0, 3.5];
        assert_eq!(SparseMatrix::identity(3).matvec(&x).unwrap(), x.to_vec());
        assert_eq!(SparseMatrix::zeros(3, 3).matvec(&x).unwrap(), vec![0.0; 3]);
        assert!(SparseMatrix::identity(2).matvec(&x).is_err());
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, -1.0]).unwrap();
        let b = SparseMatrix::from_dense(3, 2, &[1.0, 1.0, 0.0, 2.0, 4.0, 0.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.to_dense(), vec![9.0, 1.0, -4.0, 6.0]);
    }

    #[test]
    fn transpose_round_trip() {
        let a = SparseMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, -1.0]).unwrap();
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(2, 0), 2.0);
    }
}
