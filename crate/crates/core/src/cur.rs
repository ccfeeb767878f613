//! CUR factors, the `(A, B, C, D)` block partition, the two-term error
//! decomposition, the optimal middle factor and the Nyström method.
//!
//! With `A = M[I,J]`, `B = M[I,Jᶜ]`, `C = M[Iᶜ,J]`, `D = M[Iᶜ,Jᶜ]` and
//! `CUR = M[:,J] · A⁺ · M[I,:]`, whenever `A` has full column rank
//!
//! ```text
//! ‖CUR − M‖_F² = ‖(I − AA⁺) B‖_F² + ‖C A⁺ B − D‖_F²
//! ```

use crate::bordered::FULL_RANK_RTOL;
use crate::error::{Error, Result};
use crate::linalg::{pinv, pinv_from_svd, submatrix, svd, symmetric_eigenvalues, Matrix};
use crate::subsets::IndexSet;

/// `M` split into the blocks selected by `(I, J)` and their complements.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
    pub row_set: IndexSet,
    pub col_set: IndexSet,
}

fn check_sets(m: &Matrix, i: &IndexSet, j: &IndexSet) -> Result<()> {
    if i.universe() != m.rows() || j.universe() != m.cols() {
        return Err(Error::InvalidArgument(format!(
            "index sets over ({}, {}) do not match a {}x{} matrix",
            i.universe(),
            j.universe(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

pub fn partition(m: &Matrix, i: &IndexSet, j: &IndexSet) -> Result<BlockPartition> {
    check_sets(m, i, j)?;
    let (ic, jc) = (i.complement(), j.complement());
    Ok(BlockPartition {
        a: submatrix(m, i, j)?,
        b: submatrix(m, i, &jc)?,
        c: submatrix(m, &ic, j)?,
        d: submatrix(m, &ic, &jc)?,
        row_set: i.clone(),
        col_set: j.clone(),
    })
}

/// `C = M[:,J]`, `U = A⁺`, `R = M[I,:]`.
#[derive(Clone, Debug)]
pub struct CurFactors {
    pub c_factor: Matrix,
    pub u_factor: Matrix,
    pub r_factor: Matrix,
    pub row_set: IndexSet,
    pub col_set: IndexSet,
    /// Set when `A` is numerically rank deficient; the factors are still the
    /// pseudoinverse-based ones but interpolation is not guaranteed.
    pub degenerate: bool,
    /// Extreme singular values of `A`.
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl CurFactors {
    pub fn assemble(&self) -> Matrix {
        self.c_factor.matmul(&self.u_factor).matmul(&self.r_factor)
    }
}

fn check_oversampling(i: &IndexSet, j: &IndexSet) -> Result<()> {
    if i.len() < j.len() {
        return Err(Error::InvalidArgument(format!(
            "need at least as many rows as columns, got |I| = {}, |J| = {}",
            i.len(),
            j.len()
        )));
    }
    Ok(())
}

/// Builds the CUR factors for `(I, J)` and the assembled approximation.
pub fn cur_approximation(m: &Matrix, i: &IndexSet, j: &IndexSet) -> Result<(CurFactors, Matrix)> {
    check_sets(m, i, j)?;
    check_oversampling(i, j)?;
    let a = submatrix(m, i, j)?;
    let dec = svd(&a)?;
    let (sigma_min, sigma_max) = (dec.sigma_min(), dec.sigma_max());
    let factors = CurFactors {
        c_factor: submatrix(m, &IndexSet::full(m.rows()), j)?,
        u_factor: pinv_from_svd(&dec, f64::EPSILON * a.rows().max(a.cols()) as f64),
        r_factor: submatrix(m, i, &IndexSet::full(m.cols()))?,
        row_set: i.clone(),
        col_set: j.clone(),
        degenerate: !j.is_empty() && !(sigma_min > FULL_RANK_RTOL * sigma_max),
        sigma_min,
        sigma_max,
    };
    let approx = factors.assemble();
    Ok((factors, approx))
}

/// The two orthogonal pieces of the CUR error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorComponents {
    /// `‖(I − AA⁺) B‖_F²`
    pub b_err: f64,
    /// `‖C A⁺ B − D‖_F²`
    pub d_err: f64,
}

impl ErrorComponents {
    pub fn total(&self) -> f64 {
        self.b_err + self.d_err
    }
}

/// Splits the CUR error of a partition. Refuses rank-deficient `A`, where
/// the split does not hold.
pub fn error_decomposition(p: &BlockPartition) -> Result<ErrorComponents> {
    let dec = svd(&p.a)?;
    if p.a.cols() > 0 && !(dec.sigma_min() > FULL_RANK_RTOL * dec.sigma_max()) {
        return Err(Error::RankDeficient {
            sigma_min: dec.sigma_min(),
            sigma_max: dec.sigma_max(),
        });
    }
    let a_pinv = pinv_from_svd(&dec, f64::EPSILON * p.a.rows().max(p.a.cols()) as f64);
    let coef = a_pinv.matmul(&p.b);
    let b_err = p.a.matmul(&coef).sub(&p.b).frobenius_sq();
    let d_err = p.c.matmul(&coef).sub(&p.d).frobenius_sq();
    Ok(ErrorComponents { b_err, d_err })
}

/// Error components for `(I, J)` without materialising the blocks or the
/// approximation; used by the expectation engine.
pub(crate) fn pair_errors(m: &Matrix, rows: &[usize], cols: &[usize]) -> ErrorComponents {
    let a = m.select(rows, cols);
    let a_pinv = pinv(&a);
    let all_cols: Vec<usize> = (0..m.cols()).collect();
    // P = A⁺ M[I,:], so row t of CUR is M[t,J] · P
    let proj = a_pinv.matmul(&m.select(rows, &all_cols));
    let mut in_cols = vec![false; m.cols()];
    for &j in cols {
        in_cols[j] = true;
    }
    let mut in_rows = vec![false; m.rows()];
    for &i in rows {
        in_rows[i] = true;
    }
    let (mut b_err, mut d_err) = (0.0, 0.0);
    for t in 0..m.rows() {
        let mrow = m.row(t);
        for s in (0..m.cols()).filter(|&s| !in_cols[s]) {
            let approx: f64 = cols.iter().enumerate().map(|(l, &j)| mrow[j] * proj.get(l, s)).sum();
            let e = approx - mrow[s];
            if in_rows[t] {
                b_err += e * e;
            } else {
                d_err += e * e;
            }
        }
    }
    ErrorComponents { b_err, d_err }
}

/// `U★ = C⁺ M R⁺`, the Frobenius-optimal middle factor for the given `C`, `R`.
pub fn optimal_middle_factor(m: &Matrix, i: &IndexSet, j: &IndexSet) -> Result<Matrix> {
    check_sets(m, i, j)?;
    check_oversampling(i, j)?;
    let c = submatrix(m, &IndexSet::full(m.rows()), j)?;
    let r = submatrix(m, i, &IndexSet::full(m.cols()))?;
    Ok(pinv(&c).matmul(m).matmul(&pinv(&r)))
}

/// `‖C · U★ · R − M‖_F²`.
pub fn optimal_error_sq(m: &Matrix, i: &IndexSet, j: &IndexSet) -> Result<f64> {
    let u = optimal_middle_factor(m, i, j)?;
    let c = submatrix(m, &IndexSet::full(m.rows()), j)?;
    let r = submatrix(m, i, &IndexSet::full(m.cols()))?;
    Ok(c.matmul(&u).matmul(&r).sub(m).frobenius_sq())
}

/// Slack allowed on symmetry and on negative eigenvalues for Nyström input,
/// relative to `max(1, scale)`.
pub const PSD_TOL: f64 = 1e-10;

/// Nyström approximation `M[:,J] · M[J,J]⁺ · M[J,:]` of a symmetric PSD matrix.
pub fn nystrom_approximation(m: &Matrix, j: &IndexSet) -> Result<Matrix> {
    let scale = m.max_abs().max(1.0);
    if !m.is_symmetric(PSD_TOL * scale) {
        return Err(Error::InvalidArgument("Nystrom input must be symmetric".into()));
    }
    check_sets(m, j, j)?;
    let eig = symmetric_eigenvalues(m)?;
    if let Some(&lmin) = eig.first() {
        let lmax = eig.last().copied().unwrap_or(0.0).abs().max(1.0);
        if lmin < -PSD_TOL * lmax {
            return Err(Error::InvalidArgument(format!(
                "Nystrom input must be positive semidefinite, smallest eigenvalue {lmin:e}"
            )));
        }
    }
    let all = IndexSet::full(m.rows());
    let c = submatrix(m, &all, j)?;
    let w = submatrix(m, j, j)?;
    let approx = c.matmul(&pinv(&w)).matmul(&c.transpose());
    Ok(approx.add(&approx.transpose()).scale(0.5))
}
