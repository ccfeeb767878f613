use super::check_dims;
use super::report::{BoundReport, EstimationMode};
use crate::compound::{elementary_symmetric_all, squared_singular_values, DET_ROUNDING};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Oversampling factor `((m−r)(k+1)² + (r−k)(k+1)) / (m−k)` as an exact
/// ratio of integers.
///
/// It falls linearly from `(k+1)²` at `r = k` to `k+1` at `r = m`. When
/// `m = k` the only admissible `r` is `k` and the factor is taken to be the
/// `r = k` endpoint `(k+1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterpolationFactor {
    pub numerator: u128,
    pub denominator: u128,
    /// `(k+1)(r−k)`, the share attributed to the `B` block (over `denominator`).
    pub b_numerator: u128,
    /// `(k+1)²(m−r)`, the share attributed to the `D` block (over `denominator`).
    pub d_numerator: u128,
}

impl InterpolationFactor {
    pub fn new(m: usize, r: usize, k: usize) -> Result<Self> {
        if !(k <= r && r <= m) {
            return Err(Error::InvalidArgument(format!(
                "need k <= r <= m, got m={m}, r={r}, k={k}"
            )));
        }
        let (m, r, k) = (m as u128, r as u128, k as u128);
        if m == k {
            let sq = (k + 1) * (k + 1);
            return Ok(Self {
                numerator: sq,
                denominator: 1,
                b_numerator: 0,
                d_numerator: sq,
            });
        }
        let b_numerator = (k + 1) * (r - k);
        let d_numerator = (k + 1) * (k + 1) * (m - r);
        Ok(Self {
            numerator: b_numerator + d_numerator,
            denominator: m - k,
            b_numerator,
            d_numerator,
        })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Coefficient of the ratio in the `B`-block expectation.
    pub fn b_coefficient(&self) -> f64 {
        self.b_numerator as f64 / self.denominator as f64
    }

    /// Coefficient of the ratio in the `D`-block bound.
    pub fn d_coefficient(&self) -> f64 {
        self.d_numerator as f64 / self.denominator as f64
    }
}

/// Closed-form bounds for `(M, r, k)` without any expectation.
///
/// Requires `m ≥ n`; transpose wide matrices first (which swaps the roles
/// of rows and columns in the sampling). The singular-value forms
/// `sv_bound` and `tail_bound` are only reported for `r < min(m, n)`.
pub fn bound_suite(m: &Matrix, r: usize, k: usize) -> Result<BoundReport> {
    let (rows, cols) = m.shape();
    check_dims(rows, cols, r, k)?;
    if rows < cols {
        return Err(Error::Shape(format!(
            "bounds assume at least as many rows as columns, got {rows}x{cols}; transpose the input"
        )));
    }
    let sq = squared_singular_values(m)?;
    let e = elementary_symmetric_all(&sq, k + 1)?;
    let e1 = e.get(1).copied().unwrap_or(0.0);
    if !(e[k] > DET_ROUNDING * e1.powi(k as i32)) {
        return Err(Error::Degenerate(format!(
            "e_{k}(sigma^2) = {:e} vanishes; rank(M) < {k}",
            e[k]
        )));
    }
    let ratio = e[k + 1] / e[k];
    let factor = InterpolationFactor::new(rows, r, k)?;
    let fv = factor.value();
    let (sv_bound, tail_bound) = if r < rows.min(cols) {
        let tail: f64 = sq.iter().skip(k).sum();
        (Some(fv * ratio), Some(fv * tail))
    } else {
        (None, None)
    };
    Ok(BoundReport {
        k,
        r,
        m: rows,
        n: cols,
        b_err_expected: None,
        d_err_expected: None,
        total_expected: None,
        thm2_rhs: factor.b_coefficient() * ratio,
        thm3_rhs: factor.d_coefficient() * ratio,
        thm4_rhs: fv * ratio,
        sv_bound,
        tail_bound,
        compound_ratio: ratio,
        interpolation_factor: fv,
        estimation_mode: EstimationMode::BoundsOnly,
    })
}
