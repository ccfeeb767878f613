//! Dense real matrices and the baseline kernels: SVD, pseudoinverse,
//! Frobenius norm, best rank-k truncation, submatrix extraction and
//! LU-based determinants.
//!
//! Storage is row-major `f64`. Singular value and symmetric eigenvalue
//! decompositions are delegated to `nalgebra`; determinants and products
//! are computed here.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::subsets::IndexSet;

/// Default absolute tolerance for entrywise matrix comparison.
pub const EQ_ATOL: f64 = 1e-12;
/// Default relative tolerance for entrywise matrix comparison.
pub const EQ_RTOL: f64 = 1e-10;

/// Dense real matrix with finite entries stored row-major.
///
/// Zero rows or columns are allowed so that empty blocks of a partition
/// can be represented.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at ({}, {})",
                data[pos],
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of rows; ragged input is rejected.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = v;
        }
        Self::new(n, n, data)
    }

    /// Single-column matrix.
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    /// Builds a matrix entry by entry. Panics if `f` yields a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry {v} at ({i}, {j})");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(l)) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Gram matrix `selfᵀ · self`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = vec![0.0; n * n];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..n {
                let ra = row[a];
                for b in a..n {
                    g[a * n + b] += ra * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g[a * n + b] = g[b * n + a];
            }
        }
        Matrix {
            rows: n,
            cols: n,
            data: g,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Copies the rows and columns at the given positions, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Stacks `[[a, b], [cᵀ, d]]` for a column `b`, row `c` and corner `d`.
    pub fn bordered(a: &Matrix, b: &[f64], c: &[f64], d: f64) -> Result<Matrix> {
        if b.len() != a.rows || c.len() != a.cols {
            return Err(Error::Shape(format!(
                "border of lengths ({}, {}) does not fit a {}x{} block",
                b.len(),
                c.len(),
                a.rows,
                a.cols
            )));
        }
        let (r, k) = a.shape();
        let mut data = Vec::with_capacity((r + 1) * (k + 1));
        for i in 0..r {
            data.extend_from_slice(a.row(i));
            data.push(b[i]);
        }
        data.extend_from_slice(c);
        data.push(d);
        Matrix::new(r + 1, k + 1, data)
    }

    /// Appends a column on the right.
    pub fn with_column(&self, b: &[f64]) -> Result<Matrix> {
        if b.len() != self.rows {
            return Err(Error::Shape(format!(
                "column of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(b[i]);
        }
        Matrix::new(self.rows, self.cols + 1, data)
    }

    /// Appends a row at the bottom.
    pub fn with_row(&self, c: &[f64]) -> Result<Matrix> {
        if c.len() != self.cols {
            return Err(Error::Shape(format!(
                "row of length {} for {} columns",
                c.len(),
                self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(c);
        Matrix::new(self.rows + 1, self.cols, data)
    }

    /// Entrywise `|a - b| <= atol + rtol * max|b|`.
    pub fn approx_eq(&self, other: &Matrix, atol: f64, rtol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let tol = atol + rtol * other.max_abs();
        self.data.iter().zip(&other.data).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Thin singular value decomposition `M = U · diag(σ) · Vᵀ`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `m × p` with orthonormal columns, `p = min(m, n)`.
    pub left_vectors: Matrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `n × p` with orthonormal columns.
    pub right_vectors: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        self.truncated(self.singular_values.len())
    }

    /// `U_k · diag(σ_1..σ_k) · V_kᵀ`.
    fn truncated(&self, k: usize) -> Matrix {
        let m = self.left_vectors.rows();
        let n = self.right_vectors.rows();
        Matrix::from_fn(m, n, |i, j| {
            (0..k)
                .map(|l| self.left_vectors.get(i, l) * self.singular_values[l] * self.right_vectors.get(j, l))
                .sum()
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

fn check_finite(m: &Matrix) -> Result<()> {
    match m.as_slice().iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::InvalidInput(format!("non-finite entry {v}"))),
        None => Ok(()),
    }
}

/// Thin SVD with singular values sorted nonincreasing.
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return Ok(SvdResult {
            left_vectors: Matrix::zeros(rows, 0),
            singular_values: Vec::new(),
            right_vectors: Matrix::zeros(cols, 0),
        });
    }
    let dec = nalgebra::linalg::SVD::new(m.to_nalgebra(), true, true);
    let u = dec.u.as_ref().expect("requested U");
    let v_t = dec.v_t.as_ref().expect("requested V^T");
    let sigma: Vec<f64> = dec.singular_values.iter().map(|s| s.max(0.0)).collect();

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    Ok(SvdResult {
        left_vectors: Matrix::from_fn(rows, p, |i, l| u[(i, order[l])]),
        singular_values: order.iter().map(|&l| sigma[l]).collect(),
        right_vectors: Matrix::from_fn(cols, p, |j, l| v_t[(order[l], j)]),
    })
}

/// Default pseudoinverse cutoff factor: `ε · max(rows, cols)`.
pub fn default_pinv_tolerance(m: &Matrix) -> f64 {
    f64::EPSILON * m.rows().max(m.cols()) as f64
}

/// Moore–Penrose pseudoinverse. Singular values `σ_i <= tol_factor · σ_max`
/// are treated as zero.
pub fn pseudoinverse(m: &Matrix, tol_factor: f64) -> Result<Matrix> {
    if !(tol_factor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pseudoinverse tolerance factor must be positive, got {tol_factor}"
        )));
    }
    Ok(pinv_from_svd(&svd(m)?, tol_factor))
}

/// Pseudoinverse with the default cutoff.
pub fn pinv(m: &Matrix) -> Matrix {
    pseudoinverse(m, default_pinv_tolerance(m).max(f64::MIN_POSITIVE)).expect("finite matrix with positive tolerance")
}

pub(crate) fn pinv_from_svd(dec: &SvdResult, tol_factor: f64) -> Matrix {
    let m = dec.left_vectors.rows();
    let n = dec.right_vectors.rows();
    let cutoff = tol_factor * dec.sigma_max();
    let inv: Vec<f64> = dec
        .singular_values
        .iter()
        .map(|&s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 })
        .collect();
    Matrix::from_fn(n, m, |i, j| {
        inv.iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(l, &w)| dec.right_vectors.get(i, l) * w * dec.left_vectors.get(j, l))
            .sum()
    })
}

/// Sum of squared entries.
pub fn frobenius_sq(m: &Matrix) -> f64 {
    m.frobenius_sq()
}

/// Best rank-`k` approximation by truncated SVD.
pub fn best_rank_k(m: &Matrix, k: usize) -> Result<Matrix> {
    let p = m.rows().min(m.cols());
    if k > p {
        return Err(Error::InvalidArgument(format!(
            "rank {k} exceeds min(rows, cols) = {p}"
        )));
    }
    Ok(svd(m)?.truncated(k))
}

/// Copies `m[rows, cols]` in index order.
pub fn submatrix(m: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<Matrix> {
    if let Some(&i) = rows.indices().last() {
        if i >= m.rows() {
            return Err(Error::InvalidArgument(format!(
                "row index {i} out of range for {} rows",
                m.rows()
            )));
        }
    }
    if let Some(&j) = cols.indices().last() {
        if j >= m.cols() {
            return Err(Error::InvalidArgument(format!(
                "column index {j} out of range for {} columns",
                m.cols()
            )));
        }
    }
    Ok(m.select(rows.indices(), cols.indices()))
}

/// LU factorisation with partial pivoting of a square matrix, stored
/// compactly. `sign` tracks row swaps.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    fn new(m: &Matrix) -> Result<Lu> {
        if m.rows() != m.cols() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[a * n + col].abs().total_cmp(&lu[b * n + col].abs()))
                .expect("non-empty range");
            if lu[pivot * n + col] == 0.0 {
                singular = true;
                continue;
            }
            if pivot != col {
                for j in 0..n {
                    lu.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                sign = -sign;
            }
            let p = lu[col * n + col];
            for i in col + 1..n {
                let f = lu[i * n + col] / p;
                lu[i * n + col] = f;
                if f != 0.0 {
                    for j in col + 1..n {
                        lu[i * n + j] -= f * lu[col * n + j];
                    }
                }
            }
        }
        Ok(Lu {
            n,
            lu,
            perm,
            sign,
            singular,
        })
    }

    fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.n).fold(self.sign, |acc, i| acc * self.lu[i * self.n + i])
    }

    fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Some(x)
    }
}

/// Determinant of a square matrix via LU with partial pivoting. The empty
/// matrix has determinant 1.
pub fn determinant(m: &Matrix) -> Result<f64> {
    Ok(Lu::new(m)?.det())
}

/// Solves `a · x = b` for square nonsingular `a`.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows() {
        return Err(Error::Shape(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    Lu::new(a)?
        .solve(b)
        .ok_or_else(|| Error::Degenerate("singular system".into()))
}

/// Eigenvalues of a symmetric matrix, ascending. Only the lower triangle
/// is trusted; symmetry itself is the caller's responsibility.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(m.to_nalgebra());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}
