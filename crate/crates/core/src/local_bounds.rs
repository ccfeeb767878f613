//! Deterministic local bounds for a single bordered block.
//!
//! Given `X` of shape `(r+1) × (k+1)`, removing one row and one column
//! leaves an `r × k` block `A_{i,j}`. Choosing a block whose squared volume
//! is at least the average over all `(r+1)(k+1)` choices controls the CUR
//! error of `X` by `(r+1)(k+1)/(r+1−k) · λ_min(XᵀX)`. The square PD case is
//! the eigenvalue ratio bound for principal minors.

use crate::compound::gram_volume;
use crate::cur::cur_approximation;
use crate::error::{Error, Result};
use crate::linalg::{determinant, svd, symmetric_eigenvalues, Matrix};
use crate::subsets::IndexSet;

/// Outcome of the principal-minor selection on a PD matrix `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigRatioBound {
    /// Index `i*` whose deletion leaves the largest principal minor.
    pub index: usize,
    /// `det(G) / det(F_{i*})`.
    pub ratio: f64,
    /// `(k+1) / Σ_j λ_j⁻¹`.
    pub harmonic_bound: f64,
    /// `(k+1) · λ_min(G)`.
    pub bound: f64,
    /// `Σ_i det(F_i)`.
    pub minor_sum: f64,
    /// `det(G) · Σ_j λ_j⁻¹`, the spectral form of `minor_sum`.
    pub spectral_minor_sum: f64,
}

/// Symmetry slack for [`eig_ratio_bound`], relative to `max(1, max|G|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub fn eig_ratio_bound(g: &Matrix) -> Result<EigRatioBound> {
    let n = g.rows();
    if n == 0 || g.cols() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    if !g.is_symmetric(SYMMETRY_TOL * g.max_abs().max(1.0)) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let eig = symmetric_eigenvalues(g)?;
    let lmin = eig[0];
    if !(lmin > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not positive definite: lambda_min = {lmin:e}"
        )));
    }
    let minors: Vec<f64> = (0..n)
        .map(|i| {
            let keep: Vec<usize> = (0..n).filter(|&t| t != i).collect();
            determinant(&g.select(&keep, &keep)).expect("square")
        })
        .collect();
    let index = argmax(&minors);
    let det_g = determinant(g)?;
    let inv_sum: f64 = eig.iter().map(|l| 1.0 / l).sum();
    Ok(EigRatioBound {
        index,
        ratio: det_g / minors[index],
        harmonic_bound: n as f64 / inv_sum,
        bound: n as f64 * lmin,
        minor_sum: minors.iter().sum(),
        spectral_minor_sum: det_g * inv_sum,
    })
}

/// First index of the maximum.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The block chosen by [`average_volume_selection`].
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub row_removed: usize,
    pub col_removed: usize,
    /// `det(A_{i*,j*}ᵀ A_{i*,j*})`.
    pub selected_volume_sq: f64,
    /// Mean of `det(A_{i,j}ᵀ A_{i,j})` over all `(i, j)`.
    pub average_volume_sq: f64,
    /// `Σ_{i,j} det(A_{i,j}ᵀ A_{i,j})`.
    pub volume_sum: f64,
    /// `det(XᵀX)`.
    pub gram_det: f64,
    /// `λ_min(XᵀX)`, from the smallest singular value of `X`.
    pub lambda_min: f64,
    /// `(r+1)(k+1)/(r+1−k) · λ_min(XᵀX)`.
    pub bound_value: f64,
}

impl SelectionResult {
    /// `det(XᵀX) / det(A_{i*,j*}ᵀ A_{i*,j*})`.
    pub fn volume_ratio(&self) -> f64 {
        self.gram_det / self.selected_volume_sq
    }
}

fn check_local_shape(x: &Matrix) -> Result<(usize, usize)> {
    let (rows, cols) = x.shape();
    if cols == 0 || rows < cols {
        return Err(Error::InvalidArgument(format!(
            "local bounds need an (r+1)x(k+1) matrix with r >= k, got {rows}x{cols}"
        )));
    }
    Ok((rows - 1, cols - 1))
}

/// Squared volume of `x` with row `i` and column `j` removed.
pub fn deleted_volume_sq(x: &Matrix, i: usize, j: usize) -> f64 {
    let rows: Vec<usize> = (0..x.rows()).filter(|&t| t != i).collect();
    let cols: Vec<usize> = (0..x.cols()).filter(|&t| t != j).collect();
    gram_volume(&x.select(&rows, &cols))
}

/// Scans every `(i, j)` and keeps the block of largest squared volume; ties
/// go to the smallest `(i, j)` in row-major order. The maximum is always at
/// least the average, so the selection criterion holds.
pub fn average_volume_selection(x: &Matrix) -> Result<SelectionResult> {
    let (r, k) = check_local_shape(x)?;
    let vols: Vec<f64> = (0..=r)
        .flat_map(|i| (0..=k).map(move |j| (i, j)))
        .map(|(i, j)| deleted_volume_sq(x, i, j))
        .collect();
    let best = argmax(&vols);
    if !(vols[best] > 0.0) {
        return Err(Error::Degenerate("every row/column deletion has zero volume".into()));
    }
    let volume_sum: f64 = vols.iter().sum();
    let sigma_min = svd(x)?.sigma_min();
    let lambda_min = sigma_min * sigma_min;
    let factor = ((r + 1) * (k + 1)) as f64 / (r + 1 - k) as f64;
    Ok(SelectionResult {
        row_removed: best / (k + 1),
        col_removed: best % (k + 1),
        selected_volume_sq: vols[best],
        average_volume_sq: volume_sum / vols.len() as f64,
        volume_sum,
        gram_det: gram_volume(x),
        lambda_min,
        bound_value: factor * lambda_min,
    })
}

/// Measured local CUR error against the average-volume bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCurReport {
    pub selection: SelectionResult,
    /// `‖X_CUR − X‖_F²` with `X_CUR` built on the selected block.
    pub measured_error_sq: f64,
    /// `det(XᵀX) / det(AᵀA)`, which bounds `measured_error_sq`.
    pub volume_ratio: f64,
    /// Same as `selection.bound_value`.
    pub bound: f64,
}

pub fn local_cur_bound(x: &Matrix) -> Result<LocalCurReport> {
    let selection = average_volume_selection(x)?;
    let rows = IndexSet::full(x.rows()).without(selection.row_removed);
    let cols = IndexSet::full(x.cols()).without(selection.col_removed);
    let (_, approx) = cur_approximation(x, &rows, &cols)?;
    Ok(LocalCurReport {
        measured_error_sq: approx.sub(x).frobenius_sq(),
        volume_ratio: selection.volume_ratio(),
        bound: selection.bound_value,
        selection,
    })
}
