//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Columns are processed in a nested-dissection order. Each column is
//! obtained by a sparse triangular solve against the columns of `L` already
//! computed, restricted to the nonzero pattern predicted by a depth-first
//! reach. The pivot prefers the diagonal entry of the symmetrically permuted
//! matrix whenever it is within `PIVOT_THRESHOLD` of the column maximum, which
//! keeps the fill close to what the ordering predicts.

use super::{nested_dissection, SparseMatrix};
use crate::error::{Error, Result};

const PIVOT_THRESHOLD: f64 = 0.1;

/// Pivots below this fraction of the largest matrix entry count as zero.
const SINGULAR_TOLERANCE: f64 = 1e-12;

const UNSET: usize = usize::MAX;

/// Reusable LU factors `P M Q = L U` of a square sparse matrix.
///
/// Immutable once built; [`Factorization::solve`] may be called concurrently
/// from several threads since each call uses its own scratch space.
#[derive(Clone, Debug)]
pub struct Factorization {
    n: usize,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    /// `row_perm[k]` is the matrix row used as pivot `k`.
    row_perm: Vec<usize>,
    /// `col_perm[k]` is the matrix column factored at step `k`.
    col_perm: Vec<usize>,
}

impl Factorization {
    pub fn new(m: &SparseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                nrows: m.nrows(),
                ncols: m.ncols(),
            });
        }
        let n = m.nrows();
        let col_perm = nested_dissection(m);
        let max_entry = m.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let singular_below = SINGULAR_TOLERANCE * max_entry;

        let estimate = 4 * m.nnz() + n;
        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx = Vec::with_capacity(estimate);
        let mut l_val = Vec::with_capacity(estimate);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut u_idx = Vec::with_capacity(estimate);
        let mut u_val = Vec::with_capacity(estimate);

        let mut pinv = vec![UNSET; n];
        let mut x = vec![0.0; n];
        let mut reach = Reach::new(n);

        for (k, &col) in col_perm.iter().enumerate() {
            l_ptr.push(l_idx.len());
            u_ptr.push(u_idx.len());

            let (rows, vals) = m.column(col);
            let top = reach.compute(rows, &l_ptr, &l_idx, &pinv);
            let pattern = &reach.xi[top..];
            for &i in pattern {
                x[i] = 0.0;
            }
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] = v;
            }
            for &j in pattern {
                let jcol = pinv[j];
                if jcol == UNSET {
                    continue;
                }
                let xj = x[j];
                if xj == 0.0 {
                    continue;
                }
                // first entry of each L column is the unit diagonal
                let end = if jcol + 1 < l_ptr.len() {
                    l_ptr[jcol + 1]
                } else {
                    l_idx.len()
                };
                for p in l_ptr[jcol] + 1..end {
                    x[l_idx[p]] -= l_val[p] * xj;
                }
            }

            let mut pivot_row = UNSET;
            let mut largest = -1.0;
            for &i in pattern {
                if pinv[i] == UNSET {
                    let a = x[i].abs();
                    if a > largest {
                        largest = a;
                        pivot_row = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if pivot_row == UNSET || largest <= singular_below {
                return Err(Error::Singular {
                    step: k,
                    pivot: largest.max(0.0),
                });
            }
            if pinv[col] == UNSET && x[col].abs() >= PIVOT_THRESHOLD * largest {
                pivot_row = col;
            }
            let pivot = x[pivot_row];
            u_idx.push(k);
            u_val.push(pivot);
            pinv[pivot_row] = k;
            l_idx.push(pivot_row);
            l_val.push(1.0);
            for &i in pattern {
                if pinv[i] == UNSET {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
        for i in l_idx.iter_mut() {
            *i = pinv[*i];
        }
        let mut row_perm = vec![0; n];
        for (i, &k) in pinv.iter().enumerate() {
            row_perm[k] = i;
        }
        l_idx.shrink_to_fit();
        l_val.shrink_to_fit();
        u_idx.shrink_to_fit();
        u_val.shrink_to_fit();
        Ok(Self {
            n,
            l_ptr,
            l_idx,
            l_val,
            u_ptr,
            u_idx,
            u_val,
            row_perm,
            col_perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries in `L` and `U` together.
    pub fn fill(&self) -> usize {
        self.l_idx.len() + self.u_idx.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_into(b, &mut out, &mut work)?;
        Ok(out)
    }

    /// Solves `M x = b` into `out`; `work` is scratch of the same length.
    pub fn solve_into(&self, b: &[f64], out: &mut [f64], work: &mut [f64]) -> Result<()> {
        for (what, len) in [("rhs", b.len()), ("solution", out.len()), ("scratch", work.len())] {
            if len != self.n {
                return Err(Error::DimensionMismatch {
                    op: match what {
                        "rhs" => "lu_solve rhs",
                        "solution" => "lu_solve solution",
                        _ => "lu_solve scratch",
                    },
                    expected: self.n,
                    found: len,
                });
            }
        }
        for (w, &r) in work.iter_mut().zip(&self.row_perm) {
            *w = b[r];
        }
        // L y = P b, unit diagonal first in each column
        for j in 0..self.n {
            let xj = work[j];
            if xj != 0.0 {
                for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                    work[self.l_idx[p]] -= self.l_val[p] * xj;
                }
            }
        }
        // U z = y, diagonal last in each column
        for j in (0..self.n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            let xj = work[j] / self.u_val[last];
            work[j] = xj;
            if xj != 0.0 {
                for p in self.u_ptr[j]..last {
                    work[self.u_idx[p]] -= self.u_val[p] * xj;
                }
            }
        }
        for (k, &c) in self.col_perm.iter().enumerate() {
            out[c] = work[k];
        }
        Ok(())
    }
}

/// Depth-first reach of a column pattern through the graph of `L`.
struct Reach {
    xi: Vec<usize>,
    stack: Vec<usize>,
    resume: Vec<usize>,
    marked: Vec<bool>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Self {
            xi: vec![0; n],
            stack: vec![0; n],
            resume: vec![0; n],
            marked: vec![false; n],
        }
    }

    /// Fills `xi[top..]` in topological order and returns `top`.
    fn compute(&mut self, seeds: &[usize], l_ptr: &[usize], l_idx: &[usize], pinv: &[usize]) -> usize {
        let n = self.xi.len();
        let mut top = n;
        let col_end = |c: usize| {
            if c + 1 < l_ptr.len() {
                l_ptr[c + 1]
            } else {
                l_idx.len()
            }
        };
        for &seed in seeds {
            if self.marked[seed] {
                continue;
            }
            let mut head = 0;
            self.stack[0] = seed;
            loop {
                let j = self.stack[head];
                let jcol = pinv[j];
                if !self.marked[j] {
                    self.marked[j] = true;
                    self.resume[head] = if jcol == UNSET { 0 } else { l_ptr[jcol] };
                }
                let end = if jcol == UNSET { 0 } else { col_end(jcol) };
                let mut descended = false;
                let mut p = self.resume[head];
                while p < end {
                    let i = l_idx[p];
                    p += 1;
                    if !self.marked[i] {
                        self.resume[head] = p;
                        head += 1;
                        self.stack[head] = i;
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    top -= 1;
                    self.xi[top] = j;
                    if head == 0 {
                        break;
                    }
                    head -= 1;
                }
            }
        }
        for &v in &self.xi[top..] {
            self.marked[v] = false;
        }
        top
    }
}
