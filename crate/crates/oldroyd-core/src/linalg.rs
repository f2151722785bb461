//! Sparse symmetric positive definite matrices and the per-step solvers.
//!
//! Matrices are stored in compressed sparse row form with strictly
//! increasing column indices per row. Two solvers are provided: plain
//! conjugate gradients and a banded Cholesky factorization. The step
//! operator of the time steppers is constant across steps, so the
//! factorization is computed once and reused for every solve.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

/// Solver selection and tolerances for [`solve_spd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Which solver backs the solve.
    pub method: SolveMethod,
    /// Relative residual tolerance for conjugate gradients.
    pub rel_tolerance: f64,
    /// Iteration cap for conjugate gradients.
    pub max_iterations: usize,
}

/// Available SPD solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Unpreconditioned conjugate gradients.
    ConjugateGradient,
    /// Banded Cholesky factorization (direct).
    DirectCholesky,
}

impl Default for SolveOptions {
    fn default() -> Self {
        // 1e-12 keeps solver error far below the O(h^2) discretization
        // errors measured by the convergence studies.
        SolveOptions {
            method: SolveMethod::DirectCholesky,
            rel_tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

/// Errors from matrix construction and solves.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Vector length does not match the matrix dimension.
    DimensionMismatch {
        /// Dimension the operation expected.
        expected: usize,
        /// Dimension it received.
        got: usize,
    },
    /// A nonpositive pivot was met during Cholesky factorization.
    NotPositiveDefinite {
        /// Row of the offending pivot.
        row: usize,
    },
    /// CG did not reach the requested tolerance.
    NoConvergence {
        /// Iterations performed.
        iterations: usize,
        /// Relative residual at the last iterate.
        residual: f64,
    },
    /// Matrix entries must be finite.
    NonFiniteEntry,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::NotPositiveDefinite { row } => {
                write!(f, "matrix is not positive definite (pivot at row {row})")
            }
            LinalgError::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "cg failed to converge in {iterations} iterations (relative residual {residual:e})"
            ),
            LinalgError::NonFiniteEntry => write!(f, "matrix entry is not finite"),
        }
    }
}

impl core::error::Error for LinalgError {}

impl SparseMatrix {
    /// Builds a matrix from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> Result<Self, LinalgError> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if !v.is_finite() {
                return Err(LinalgError::NonFiniteEntry);
            }
            if i >= n || j >= n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    got: i.max(j) + 1,
                });
            }
            per_row[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_unstable_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for &(j, v) in row.iter() {
                if last == Some(j) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric,
        })
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
            symmetric: true,
        }
    }

    /// Matrix dimension.
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Whether the matrix was flagged symmetric at construction.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored entry at (i, j), or 0.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates the stored entries of row `i` as (col, value).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// y = A x, in place. Lengths are checked in debug builds only.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, out) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// Largest absolute difference between A and its transpose.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let d = libm::fabs(v - self.get(j, i));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Sum of all stored entries.
    pub fn entry_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of the entries of row `i`.
    pub fn row_sum(&self, i: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.values[lo..hi].iter().sum()
    }

    /// Half-bandwidth: max over stored entries of |i - j|.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }
}

/// y = A x with a dimension check.
pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if x.len() != a.n {
        return Err(LinalgError::DimensionMismatch {
            expected: a.n,
            got: x.len(),
        });
    }
    let mut y = vec![0.0; a.n];
    a.apply_into(x, &mut y);
    Ok(y)
}

/// c1*A + c2*B with merged sparsity patterns.
pub fn add_scaled(c1: f64, a: &SparseMatrix, c2: f64, b: &SparseMatrix) -> SparseMatrix {
    assert_eq!(a.n, b.n, "matrix dimensions must agree");
    let n = a.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let (alo, ahi) = (a.row_ptr[i], a.row_ptr[i + 1]);
        let (blo, bhi) = (b.row_ptr[i], b.row_ptr[i + 1]);
        let (mut p, mut q) = (alo, blo);
        while p < ahi || q < bhi {
            let ja = if p < ahi { a.col_idx[p] } else { usize::MAX };
            let jb = if q < bhi { b.col_idx[q] } else { usize::MAX };
            if ja < jb {
                col_idx.push(ja);
                values.push(c1 * a.values[p]);
                p += 1;
            } else if jb < ja {
                col_idx.push(jb);
                values.push(c2 * b.values[q]);
                q += 1;
            } else {
                col_idx.push(ja);
                values.push(c1 * a.values[p] + c2 * b.values[q]);
                p += 1;
                q += 1;
            }
        }
        row_ptr.push(col_idx.len());
    }
    SparseMatrix {
        n,
        row_ptr,
        col_idx,
        values,
        symmetric: a.symmetric && b.symmetric,
    }
}

/// Banded Cholesky factorization A = L L^T of an SPD matrix.
///
/// The lower band is stored densely row by row, which suits the
/// interior-DOF numbering of the uniform mesh (half-bandwidth m).
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    // band[i * (bw + 1) + d] = L(i, i - bw + d), zero-padded at the left edge.
    band: Vec<f64>,
}

impl BandCholesky {
    /// Factors `a`; fails if a nonpositive pivot shows up.
    pub fn factor(a: &SparseMatrix) -> Result<Self, LinalgError> {
        let n = a.n;
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    band[i * w + (bw - (i - j))] = v;
                }
            }
        }
        for i in 0..n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let kmin = jmin.max(j.saturating_sub(bw));
                let mut s = band[i * w + (bw - (i - j))];
                for k in kmin..j {
                    s -= band[i * w + (bw - (i - k))] * band[j * w + (bw - (j - k))];
                }
                if j < i {
                    band[i * w + (bw - (i - j))] = s / band[j * w + bw];
                } else {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { row: i });
                    }
                    band[i * w + bw] = libm::sqrt(s);
                }
            }
        }
        Ok(BandCholesky { n, bw, band })
    }

    /// Solves A x = rhs using the stored factor.
    #[allow(clippy::needless_range_loop)] // substitution reads x[j] while writing x[i]
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if rhs.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        let w = self.bw + 1;
        let mut x = rhs.to_vec();
        // forward: L y = rhs
        for i in 0..self.n {
            let jmin = i.saturating_sub(self.bw);
            let mut s = x[i];
            for j in jmin..i {
                s -= self.band[i * w + (self.bw - (i - j))] * x[j];
            }
            x[i] = s / self.band[i * w + self.bw];
        }
        // backward: L^T x = y
        for i in (0..self.n).rev() {
            let imax = (i + self.bw).min(self.n - 1);
            let mut s = x[i];
            for j in (i + 1)..=imax {
                s -= self.band[j * w + (self.bw - (j - i))] * x[j];
            }
            x[i] = s / self.band[i * w + self.bw];
        }
        Ok(x)
    }

    /// Matrix dimension.
    pub fn dimension(&self) -> usize {
        self.n
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// Solves A x = b by unpreconditioned conjugate gradients.
pub fn solve_cg(
    a: &SparseMatrix,
    b: &[f64],
    rel_tolerance: f64,
    max_iterations: usize,
) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.n {
        return Err(LinalgError::DimensionMismatch {
            expected: a.n,
            got: b.len(),
        });
    }
    let nb = norm2(b);
    if nb == 0.0 {
        return Ok(vec![0.0; a.n]);
    }
    let mut x = vec![0.0; a.n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; a.n];
    let mut rr = dot(&r, &r);
    for it in 0..max_iterations {
        if libm::sqrt(rr) <= rel_tolerance * nb {
            return Ok(x);
        }
        a.apply_into(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for i in 0..a.n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..a.n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        if it + 1 == max_iterations {
            break;
        }
    }
    if libm::sqrt(rr) <= rel_tolerance * nb {
        return Ok(x);
    }
    Err(LinalgError::NoConvergence {
        iterations: max_iterations,
        residual: libm::sqrt(rr) / nb,
    })
}

/// Solves the SPD system A x = rhs with the selected method.
pub fn solve_spd(
    a: &SparseMatrix,
    rhs: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<f64>, LinalgError> {
    match opts.method {
        SolveMethod::ConjugateGradient => solve_cg(a, rhs, opts.rel_tolerance, opts.max_iterations),
        SolveMethod::DirectCholesky => BandCholesky::factor(a)?.solve(rhs),
    }
}
