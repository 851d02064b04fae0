//! Small dense kernels, a compressed-row sparse matrix, and a banded `LDLᵀ` direct solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest absolute entry, `0` for an empty slice.
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Index of the largest absolute entry; ties resolve to the smallest index.
pub fn argmax_abs(a: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in a.iter().enumerate() {
        let v = x.abs();
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from its rows. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = DenseMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Sets entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Adds to entry `(i, j)`.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Leading `r × c` block.
    pub fn leading(&self, r: usize, c: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(r, c);
        for i in 0..r {
            m.data[i * c..(i + 1) * c].copy_from_slice(&self.row(i)[..c]);
        }
        m
    }

    /// Copy with `extra_rows` zero rows and `extra_cols` zero columns appended.
    pub fn grown(&self, extra_rows: usize, extra_cols: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows + extra_rows, self.cols + extra_cols);
        for i in 0..self.rows {
            m.data[i * m.cols..i * m.cols + self.cols].copy_from_slice(self.row(i));
        }
        m
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(Error::invalid(format!(
                "dense solve needs a square system, got {}x{} with rhs {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = norm_inf(&a).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 1e-14 * scale) {
                return Err(Error::SolverFailure {
                    reason: format!("singular dense matrix (pivot {best:.3e} in column {k})"),
                    residual: f64::NAN,
                    refinements: 0,
                });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                x.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                    x[i] -= f * x[k];
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[k * n + j] * x[j];
            }
            x[k] = s / a[k * n + k];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure {
                reason: "non-finite dense solution".into(),
                residual: f64::NAN,
                refinements: 0,
            });
        }
        Ok(x)
    }
}

/// Solves `L x = b` using the lower triangle (diagonal included) of the leading `b.len()` block.
pub fn forward_substitution(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let row = l.row(i);
        let mut s = b[i];
        for j in 0..i {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
    x
}

/// Sparsity pattern in compressed-row form; column indices sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrPattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl CsrPattern {
    /// Builds a square pattern from (row, col) pairs; duplicates are merged.
    pub fn from_pairs(n: usize, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_ptr = vec![0; n + 1];
        for &(i, _) in &pairs {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = pairs.into_iter().map(|(_, j)| j).collect();
        CsrPattern { n, row_ptr, col_idx }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Position of `(i, j)` in the value array.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        cols.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    /// Half bandwidth `max |i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.n {
            for &j in &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]] {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }
}

/// Square sparse matrix in compressed-row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: alloc::sync::Arc<CsrPattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix on a shared pattern.
    pub fn zeros(pattern: alloc::sync::Arc<CsrPattern>) -> Self {
        let nnz = pattern.nnz();
        CsrMatrix {
            pattern,
            values: vec![0.0; nnz],
        }
    }

    /// Identity of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let pattern = CsrPattern::from_pairs(n, (0..n).map(|i| (i, i)).collect());
        CsrMatrix {
            pattern: alloc::sync::Arc::new(pattern),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let pattern = CsrPattern::from_pairs(n, triplets.iter().map(|&(i, j, _)| (i, j)).collect());
        let mut m = CsrMatrix::zeros(alloc::sync::Arc::new(pattern));
        for &(i, j, v) in triplets {
            let p = m.pattern.position(i, j).expect("entry in pattern");
            m.values[p] += v;
        }
        m
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.pattern.n
    }

    /// Shared pattern.
    pub fn pattern(&self) -> &alloc::sync::Arc<CsrPattern> {
        &self.pattern
    }

    /// Stored values, in pattern order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable stored values, in pattern order.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Iterates over the stored `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        self.pattern.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A x` into a caller buffer.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        let p = &self.pattern;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                s += self.values[k] * x[p.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// `yᵀ A x`
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        dot(y, &self.mul_vec(x))
    }

    /// `self + alpha * other`; both must share the same pattern.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.pattern != other.pattern {
            return Err(Error::invalid("matrices do not share a sparsity pattern"));
        }
        let mut out = self.clone();
        axpy(alpha, &other.values, &mut out.values);
        Ok(out)
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = norm_inf(&self.values).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }
}

/// `LDLᵀ` factorization of a symmetric matrix in band storage.
///
/// No pivoting is performed; the factorization fails on a vanishing pivot. Dirichlet-eliminated
/// stiffness-plus-reaction operators are symmetric positive definite and factor stably.
#[derive(Debug, Clone)]
pub struct BandedLdl {
    n: usize,
    bw: usize,
    /// Strict lower band of `L`, row `i` holds columns `i - bw .. i`.
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl BandedLdl {
    /// Factors `a`, which must be structurally and numerically symmetric.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let bw = a.pattern.bandwidth();
        let w = bw + 1;
        let mut lower = vec![0.0; n * w];
        let mut diag = vec![0.0; n];
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j < i {
                    lower[i * w + (j + bw - i)] = v;
                } else if j == i {
                    diag[i] = v;
                    scale = scale.max(v.abs());
                }
            }
        }
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
        // u[k] = L[i][k] * D[k] for the row in progress.
        let mut u = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row_i = i * w + bw - i;
            for j in lo..i {
                let klo = lo.max(j.saturating_sub(bw));
                let row_j = j * w + bw - j;
                let mut s = lower[row_i + j];
                for k in klo..j {
                    s -= u[k - lo] * lower[row_j + k];
                }
                u[j - lo] = s;
                lower[row_i + j] = s / diag[j];
            }
            let mut d = diag[i];
            for k in lo..i {
                d -= u[k - lo] * lower[row_i + k];
            }
            if !(d.abs() > tiny) || !d.is_finite() {
                return Err(Error::SolverFailure {
                    reason: format!("vanishing pivot {d:.3e} at row {i} of banded LDLᵀ"),
                    residual: f64::NAN,
                    refinements: 0,
                });
            }
            diag[i] = d;
        }
        Ok(BandedLdl { n, bw, lower, diag })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves with the stored factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let base = i * w + bw - i;
            let mut s = x[i];
            for k in lo..i {
                s -= self.lower[base + k] * x[k];
            }
            x[i] = s;
        }
        for (xi, d) in x.iter_mut().zip(&self.diag) {
            *xi /= d;
        }
        for i in (0..n).rev() {
            let xi = x[i];
            let lo = i.saturating_sub(bw);
            let base = i * w + bw - i;
            for k in lo..i {
                x[k] -= self.lower[base + k] * xi;
            }
        }
        x
    }
}

/// A factored operator that solves to a relative residual of `1e-10`, refining if needed.
#[derive(Debug, Clone)]
pub struct SparseSolver {
    op: CsrMatrix,
    factor: BandedLdl,
}

/// Relative residual required from every sparse solve.
pub const SPARSE_RESIDUAL_TOL: f64 = 1e-10;

impl SparseSolver {
    /// Factors `op`.
    pub fn new(op: CsrMatrix) -> Result<Self> {
        let factor = BandedLdl::factor(&op)?;
        Ok(SparseSolver { op, factor })
    }

    /// The factored operator.
    pub fn operator(&self) -> &CsrMatrix {
        &self.op
    }

    /// Solves `op x = rhs`, with up to two steps of iterative refinement.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let rhs_norm = norm2(rhs);
        let mut x = self.factor.solve(rhs);
        if rhs_norm == 0.0 {
            return Ok(x);
        }
        let mut refinements = 0;
        loop {
            let mut r = self.op.mul_vec(&x);
            for (ri, bi) in r.iter_mut().zip(rhs) {
                *ri = bi - *ri;
            }
            let rel = norm2(&r) / rhs_norm;
            if rel <= SPARSE_RESIDUAL_TOL {
                return Ok(x);
            }
            if refinements == 2 || !rel.is_finite() {
                return Err(Error::SolverFailure {
                    reason: "residual tolerance not met".into(),
                    residual: rel,
                    refinements,
                });
            }
            let dx = self.factor.solve(&r);
            axpy(1.0, &dx, &mut x);
            refinements += 1;
        }
    }
}

/// Factors and solves `op x = rhs` once.
pub fn solve_sparse(op: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != op.dim() {
        return Err(Error::invalid("right-hand side length does not match the operator"));
    }
    SparseSolver::new(op.clone())?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_solve_returns_rhs() {
        let id = CsrMatrix::identity(4);
        let b = [1.0, -2.0, 3.5, 0.0];
        assert_eq!(solve_sparse(&id, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn two_by_two_spd() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let x = solve_sparse(&a, &[3.0, 3.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(solve_sparse(&a, &[1.0, 2.0]), Err(Error::SolverFailure { .. })));
    }

    #[test]
    fn banded_matches_dense_on_tridiagonal() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + i as f64 * 0.1));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
            if i + 3 < n {
                t.push((i, i + 3, 0.5));
                t.push((i + 3, i, 0.5));
            }
        }
        let a = CsrMatrix::from_triplets(n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_sparse(&a, &b).unwrap();
        let mut dense = DenseMatrix::zeros(n, n);
        for &(i, j, v) in &t {
            dense.add(i, j, v);
        }
        let y = dense.solve(&b).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_relative_eq!(xi, yi, epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_lu_needs_pivoting() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(a.solve(&[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn forward_substitution_lower() {
        let b = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.4, 1.0]]);
        let x = forward_substitution(&b, &[1.0, 2.0]);
        assert_relative_eq!(x[1], 1.6, epsilon = 1e-15);
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax_abs(&[1.0, -3.0, 3.0]), Some(1));
        assert_eq!(argmax_abs(&[]), None);
    }
}
