//! Volume sampling of `(I, J)` pairs and the expected CUR error.
//!
//! A pair `(I, J)` with `|I| = r`, `|J| = k` is drawn with probability
//! `det(M[I,J]ᵀ M[I,J]) / ζ`, where `ζ = C(m−k, r−k) · ‖C_k(M)‖_F²`.
//! Under that law
//!
//! * `E ‖(I − AA⁺) B‖² = (k+1)(r−k)/(m−k) · ‖C_{k+1}‖²/‖C_k‖²` exactly,
//! * `E ‖C A⁺ B − D‖² ≤ (k+1)²(m−r)/(m−k) · ‖C_{k+1}‖²/‖C_k‖²`,
//!
//! and `‖C_j(M)‖² = e_j(σ²)`. This module enumerates the distribution,
//! samples from it, evaluates the expectations exactly or by Monte Carlo,
//! and computes the closed-form right-hand sides.

mod bounds;
mod distribution;
mod expectation;
mod report;
mod sampler;

pub use bounds::{bound_suite, InterpolationFactor};
pub use distribution::{
    build_distribution, build_distribution_with_cap, sample, sample_indices, total_variation, zeta_closed_form,
    SubsetDistribution, WeightedPair,
};
pub use expectation::{
    expected_errors_exact, expected_errors_exact_with_cap, expected_errors_mc, expected_errors_mc_with_cap,
};
pub use report::{BoundReport, EstimationMode, CSV_COLUMNS};
pub use sampler::FactoredSampler;

use crate::error::{Error, Result};

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `1 ≤ k ≤ r ≤ m` and `k ≤ n`.
pub(crate) fn check_dims(m: usize, n: usize, r: usize, k: usize) -> Result<()> {
    if !(1 <= k && k <= r && r <= m && k <= n) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= r <= m and k <= n, got m={m}, n={n}, r={r}, k={k}"
        )));
    }
    Ok(())
}
