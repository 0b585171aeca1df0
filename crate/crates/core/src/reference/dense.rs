//! Small dense matrices for reference computations.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                op: "dense from_rows",
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_sparse(m: &SparseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                nrows: m.nrows(),
                ncols: m.ncols(),
            });
        }
        Ok(Self {
            n: m.nrows(),
            data: m.to_dense(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn same_dim(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                op,
                expected: self.n,
                found: other.n,
            })
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other, "dense matmul")?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[l * n..(l + 1) * n];
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "dense matvec",
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `alpha·self + beta·other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.same_dim(other, "dense combine")?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `self⁻¹ · rhs` by Gaussian elimination with partial pivoting.
    pub fn solve_matrix(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs, "dense solve")?;
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = rhs.data.clone();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for col in 0..n {
            let (p, pv) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pv.is_nan() || pv <= 1e-14 * scale {
                return Err(Error::Singular { step: col, pivot: pv });
            }
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                    x.swap(p * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                for j in 0..n {
                    x[r * n + j] -= f * x[col * n + j];
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..n {
                let mut s = x[col * n + j];
                for l in col + 1..n {
                    s -= a[col * n + l] * x[l * n + j];
                }
                x[col * n + j] = s / d;
            }
        }
        Ok(Self { n, data: x })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = Self::zeros(self.n);
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "dense solve",
                expected: self.n,
                found: b.len(),
            });
        }
        for (i, v) in b.iter().enumerate() {
            rhs.data[i * self.n] = *v;
        }
        let x = self.solve_matrix(&rhs)?;
        Ok((0..self.n).map(|i| x.data[i * self.n]).collect())
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Result<Self> {
        let norm = self.norm_inf();
        if !norm.is_finite() {
            return Err(Error::ExpmOverflow(norm));
        }
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let x = self.scaled(0.5f64.powi(squarings));
        let mut sum = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for j in 1..40 {
            term = term.matmul(&x)?.scaled(1.0 / j as f64);
            sum = sum.combine(1.0, &term, 1.0)?;
            if term.norm_inf() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum)?;
        }
        if sum.data.iter().all(|v| v.is_finite()) {
            Ok(sum)
        } else {
            Err(Error::ExpmOverflow(norm))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal() {
        let m = DenseMatrix::from_rows(2, vec![-3.0, 0.0, 0.0, 0.5]).unwrap();
        let e = m.expm().unwrap();
        assert!((e.get(0, 0) / (-3.0f64).exp() - 1.0).abs() < 1e-14);
        assert!((e.get(1, 1) / 0.5f64.exp() - 1.0).abs() < 1e-14);
        assert_eq!(e.get(0, 1), 0.0);
    }

    #[test]
    fn expm_of_rotation() {
        let th = 2.5;
        let m = DenseMatrix::from_rows(2, vec![0.0, -th, th, 0.0]).unwrap();
        let e = m.expm().unwrap();
        assert!((e.get(0, 0) - th.cos()).abs() < 1e-14);
        assert!((e.get(1, 0) - th.sin()).abs() < 1e-14);
    }

    #[test]
    fn expm_nilpotent() {
        let m = DenseMatrix::from_rows(2, vec![0.0, 7.0, 0.0, 0.0]).unwrap();
        let e = m.expm().unwrap();
        assert!((e.get(0, 1) - 7.0).abs() < 1e-13);
    }

    #[test]
    fn expm_overflow_reported() {
        let m = DenseMatrix::from_rows(1, vec![f64::INFINITY]).unwrap();
        assert!(matches!(m.expm(), Err(Error::ExpmOverflow(_))));
        let big = DenseMatrix::from_rows(1, vec![1000.0]).unwrap();
        assert!(matches!(big.expm(), Err(Error::ExpmOverflow(_))));
    }

    #[test]
    fn solve_round_trip() {
        let m = DenseMatrix::from_rows(3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]).unwrap();
        let x = [1.0, -2.0, 0.5];
        let b = m.matvec(&x).unwrap();
        let y = m.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(DenseMatrix::zeros(2).solve(&[1.0, 1.0]).is_err());
    }
}
