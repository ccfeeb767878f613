//! Determinant identities for bordered Gramians.
//!
//! For `A` (`r × k`, full column rank), a column `b`, a row `cᵀ` and a
//! corner `d`:
//!
//! ```text
//! det([A b]ᵀ[A b])     = det(AᵀA) · ‖(I − AA⁺) b‖²
//! det(AᵀA + c cᵀ)      = det(AᵀA) · (1 + cᵀ (AᵀA)⁻¹ c)
//! det(XᵀX)             = det(AᵀA + c cᵀ) · ‖u‖² + det(AᵀA) · γ²
//!     X = [[A, b], [cᵀ, d]],  u = (I − AA⁺) b,  γ = d − cᵀ A⁺ b
//! ```
//!
//! Each function evaluates the left side directly from the bordered matrix
//! and the right side from the factored form, so the pair doubles as a
//! residual check.

use crate::compound::{gram_volume, minor};
use crate::error::{Error, Result};
use crate::linalg::{dot, pinv_from_svd, solve, svd, Matrix};
use crate::subsets::enumerate_subsets;

/// Relative floor on `σ_min / σ_max` for the full-column-rank precondition.
pub const FULL_RANK_RTOL: f64 = 1e-10;

/// Both sides of one bordered identity.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderedResult {
    /// Gram determinant of the bordered matrix.
    pub lhs: f64,
    /// Factored form.
    pub rhs: f64,
    /// `‖(I − AA⁺) b‖²`, when a column was added.
    pub residual_norm_sq: Option<f64>,
    /// `γ = d − cᵀ A⁺ b`, when both a row and a column were added.
    pub schur_scalar: Option<f64>,
    /// `det(AᵀA) · (1 + ‖b‖² + ‖c‖² + d²)`; the floor of the comparison.
    pub scale: f64,
}

impl BorderedResult {
    /// `|lhs − rhs| / max(|lhs|, |rhs|, scale)`.
    pub fn relative_residual(&self) -> f64 {
        let denom = self.lhs.abs().max(self.rhs.abs()).max(self.scale);
        if denom == 0.0 {
            return 0.0;
        }
        (self.lhs - self.rhs).abs() / denom
    }

    pub fn holds(&self, rtol: f64) -> bool {
        self.relative_residual() <= rtol
    }
}

/// Pieces of `A` reused by every identity.
struct Base {
    gram_det: f64,
    pinv: Matrix,
}

fn full_rank_base(a: &Matrix) -> Result<Base> {
    if a.rows() < a.cols() {
        return Err(Error::Shape(format!(
            "base block must have at least as many rows as columns, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dec = svd(a)?;
    if a.cols() > 0 {
        let (smin, smax) = (dec.sigma_min(), dec.sigma_max());
        if !(smin > FULL_RANK_RTOL * smax) {
            return Err(Error::RankDeficient {
                sigma_min: smin,
                sigma_max: smax,
            });
        }
    }
    Ok(Base {
        gram_det: gram_volume(a),
        pinv: pinv_from_svd(&dec, f64::EPSILON * a.rows().max(a.cols()) as f64),
    })
}

fn projection_residual(a: &Matrix, a_pinv: &Matrix, b: &[f64]) -> Vec<f64> {
    let coef = a_pinv.apply(b);
    let proj = a.apply(&coef);
    b.iter().zip(&proj).map(|(x, p)| x - p).collect()
}

fn check_len(name: &str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Shape(format!(
            "{name} has length {}, expected {expected}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
    }
    Ok(())
}

/// Appending a column `b` to `A`.
pub fn add_column_identity(a: &Matrix, b: &[f64]) -> Result<BorderedResult> {
    check_len("b", b, a.rows())?;
    let base = full_rank_base(a)?;
    let u = projection_residual(a, &base.pinv, b);
    let u_sq = dot(&u, &u);
    Ok(BorderedResult {
        lhs: gram_volume(&a.with_column(b)?),
        rhs: base.gram_det * u_sq,
        residual_norm_sq: Some(u_sq),
        schur_scalar: None,
        scale: base.gram_det * (1.0 + dot(b, b)),
    })
}

/// Appending a row `cᵀ` to `A`.
pub fn add_row_identity(a: &Matrix, c: &[f64]) -> Result<BorderedResult> {
    check_len("c", c, a.cols())?;
    let base = full_rank_base(a)?;
    let quad = if c.is_empty() {
        0.0
    } else {
        dot(c, &solve(&a.gram(), c)?)
    };
    Ok(BorderedResult {
        lhs: gram_volume(&a.with_row(c)?),
        rhs: base.gram_det * (1.0 + quad),
        residual_norm_sq: None,
        schur_scalar: None,
        scale: base.gram_det * (1.0 + dot(c, c)),
    })
}

/// Appending a column `b`, a row `cᵀ` and the corner `d` to `A`.
pub fn add_both_identity(a: &Matrix, b: &[f64], c: &[f64], d: f64) -> Result<BorderedResult> {
    check_len("b", b, a.rows())?;
    check_len("c", c, a.cols())?;
    if !d.is_finite() {
        return Err(Error::InvalidInput("d is not finite".into()));
    }
    let base = full_rank_base(a)?;
    let u = projection_residual(a, &base.pinv, b);
    let u_sq = dot(&u, &u);
    let gamma = d - dot(c, &base.pinv.apply(b));
    let updated_det = gram_volume(&a.with_row(c)?);
    Ok(BorderedResult {
        lhs: gram_volume(&Matrix::bordered(a, b, c, d)?),
        rhs: updated_det * u_sq + base.gram_det * gamma * gamma,
        residual_norm_sq: Some(u_sq),
        schur_scalar: Some(gamma),
        scale: base.gram_det * (1.0 + dot(b, b) + dot(c, c) + d * d),
    })
}

/// Change in Gram determinant from the last row of `x`, alongside the
/// Cauchy–Binet sum it must equal.
#[derive(Clone, Debug, PartialEq)]
pub struct GramIncrement {
    /// `det(XᵀX) − det(YᵀY)` with `Y` = `x` minus its last row.
    pub increment: f64,
    /// Sum of squared `(k+1) × (k+1)` minors whose row set includes the last row.
    pub minor_sum: f64,
    /// Hadamard bound `∏ (XᵀX)_jj`.
    pub scale: f64,
}

impl GramIncrement {
    pub fn relative_residual(&self) -> f64 {
        let denom = self.increment.abs().max(self.minor_sum.abs()).max(self.scale);
        if denom == 0.0 {
            return 0.0;
        }
        (self.increment - self.minor_sum).abs() / denom
    }
}

/// Gram-determinant increment of an `(r+1) × (k+1)` matrix with `r ≥ k+1`.
pub fn gram_increment(x: &Matrix) -> Result<GramIncrement> {
    let (rows, cols) = x.shape();
    if rows < cols + 1 {
        return Err(Error::InvalidArgument(format!(
            "gram increment needs rows >= cols + 1, got {rows}x{cols}"
        )));
    }
    let last = rows - 1;
    let top: Vec<usize> = (0..last).collect();
    let y = x.select(&top, &(0..cols).collect::<Vec<_>>());
    let all_cols: Vec<usize> = (0..cols).collect();
    let minor_sum = enumerate_subsets(rows, cols)?
        .filter(|h| h.contains(last))
        .map(|h| {
            let v = minor(x, h.indices(), &all_cols);
            v * v
        })
        .sum();
    let g = x.gram();
    Ok(GramIncrement {
        increment: gram_volume(x) - gram_volume(&y),
        minor_sum,
        scale: (0..cols).map(|j| g.get(j, j)).product(),
    })
}
