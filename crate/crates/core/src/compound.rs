//! Compound matrices, squared volumes and elementary symmetric polynomials.
//!
//! `‖C_k(M)‖_F²` is evaluated from the singular values as `e_k(σ²)`; the
//! explicit minor table is only built on request and is what the tests use
//! to cross-check the fast path.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, svd, Matrix};
use crate::subsets::{binomial, subsets_vec, IndexSet, DEFAULT_ENUMERATION_CAP};

/// Relative cutoff below which a minor or Gram determinant is rounded to 0.
pub const DET_ROUNDING: f64 = 1e-14;

/// All `k × k` minors of a matrix, indexed by lexicographic subsets.
#[derive(Clone, Debug)]
pub struct CompoundMatrix {
    pub order: usize,
    pub row_subsets: Vec<IndexSet>,
    pub col_subsets: Vec<IndexSet>,
    /// `C(m,k) × C(n,k)` table; entry `(a, b)` is `det(M[row_subsets[a], col_subsets[b]])`.
    pub minors: Matrix,
}

impl CompoundMatrix {
    pub fn norm_sq(&self) -> f64 {
        self.minors.frobenius_sq()
    }

    /// Minor for an explicit `(rows, cols)` pair, if both are `k`-subsets.
    pub fn minor(&self, rows: &IndexSet, cols: &IndexSet) -> Option<f64> {
        let a = self.row_subsets.binary_search(rows).ok()?;
        let b = self.col_subsets.binary_search(cols).ok()?;
        Some(self.minors.get(a, b))
    }
}

/// Determinant of `m[rows, cols]`, rounded to zero when
/// `|det| < DET_ROUNDING · scale^k` with `scale` the largest entry magnitude.
pub fn minor(m: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    debug_assert_eq!(rows.len(), cols.len());
    let sub = m.select(rows, cols);
    let det = determinant(&sub).expect("square by construction");
    let scale = sub.max_abs();
    if det.abs() < DET_ROUNDING * scale.powi(rows.len() as i32) {
        0.0
    } else {
        det
    }
}

/// The `k`-th compound matrix, subject to the default enumeration cap on
/// the number of table entries.
pub fn compound(m: &Matrix, k: usize) -> Result<CompoundMatrix> {
    compound_with_cap(m, k, Some(DEFAULT_ENUMERATION_CAP))
}

pub fn compound_with_cap(m: &Matrix, k: usize, cap: Option<u128>) -> Result<CompoundMatrix> {
    let (rows, cols) = m.shape();
    if k > rows.min(cols) {
        return Err(Error::InvalidArgument(format!(
            "compound order {k} exceeds min(rows, cols) = {}",
            rows.min(cols)
        )));
    }
    let entries = binomial(rows as u64, k as u64)?
        .checked_mul(binomial(cols as u64, k as u64)?)
        .ok_or_else(|| Error::Overflow("compound table size".into()))?;
    if let Some(cap) = cap {
        if entries > cap {
            return Err(Error::TooLarge {
                requested: entries,
                cap,
            });
        }
    }
    let row_subsets = subsets_vec(rows, k)?;
    let col_subsets = subsets_vec(cols, k)?;
    let data: Vec<f64> = row_subsets
        .par_iter()
        .flat_map_iter(|rs| col_subsets.iter().map(move |cs| minor(m, rs.indices(), cs.indices())))
        .collect();
    let minors = Matrix::new(row_subsets.len(), col_subsets.len(), data)?;
    Ok(CompoundMatrix {
        order: k,
        row_subsets,
        col_subsets,
        minors,
    })
}

/// `‖C_k(M)‖_F² = e_k(σ_1², …, σ_p²)`, computed from the singular values.
pub fn compound_norm_sq(m: &Matrix, k: usize) -> Result<f64> {
    let p = m.rows().min(m.cols());
    if k > p {
        return Err(Error::InvalidArgument(format!(
            "compound order {k} exceeds min(rows, cols) = {p}"
        )));
    }
    let sq = squared_singular_values(m)?;
    elementary_symmetric(&sq, k)
}

pub(crate) fn squared_singular_values(m: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.singular_values.iter().map(|s| s * s).collect())
}

/// `e_0 … e_kmax` of nonnegative values via the coefficient recurrence of
/// `∏ (1 + v_i t)`. Entries past `values.len()` are zero.
pub fn elementary_symmetric_all(values: &[f64], kmax: usize) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "elementary symmetric polynomials need finite nonnegative inputs, got {v}"
        )));
    }
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for (count, &v) in values.iter().enumerate() {
        let top = (count + 1).min(kmax);
        for j in (1..=top).rev() {
            e[j] += v * e[j - 1];
        }
    }
    Ok(e)
}

/// `e_k(values)`; `e_0 = 1` and `e_k = 0` for `k > values.len()`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    Ok(elementary_symmetric_all(values, k)?[k])
}

/// Squared volume `det(mᵀ m)` of a matrix with at least as many rows as
/// columns, clamped to zero under round-off.
pub fn volume_sq(m: &Matrix) -> Result<f64> {
    if m.rows() < m.cols() {
        return Err(Error::InvalidArgument(format!(
            "volume needs rows >= cols, got {}x{}; transpose first",
            m.rows(),
            m.cols()
        )));
    }
    Ok(gram_volume(m))
}

/// `det(mᵀ m)` without the shape check (zero when rows < cols).
pub(crate) fn gram_volume(m: &Matrix) -> f64 {
    let g = m.gram();
    let hadamard: f64 = (0..g.rows()).map(|i| g.get(i, i)).product();
    let det = determinant(&g).expect("gram is square");
    if det <= DET_ROUNDING * hadamard {
        0.0
    } else {
        det
    }
}
