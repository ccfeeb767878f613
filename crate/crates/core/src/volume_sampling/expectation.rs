use rayon::prelude::*;

use super::bounds::bound_suite;
use super::compensated_sum;
use super::distribution::build_distribution_with_cap;
use super::report::{BoundReport, EstimationMode};
use super::sampler::FactoredSampler;
use crate::cur::pair_errors;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::subsets::DEFAULT_ENUMERATION_CAP;

/// Exact expected errors by enumerating every `(I, J)` pair.
pub fn expected_errors_exact(m: &Matrix, r: usize, k: usize) -> Result<BoundReport> {
    expected_errors_exact_with_cap(m, r, k, Some(DEFAULT_ENUMERATION_CAP))
}

pub fn expected_errors_exact_with_cap(m: &Matrix, r: usize, k: usize, cap: Option<u128>) -> Result<BoundReport> {
    let mut report = bound_suite(m, r, k)?;
    let dist = build_distribution_with_cap(m, r, k, cap)?;
    // zero-weight pairs have probability zero and are skipped
    let terms: Vec<(f64, f64)> = dist
        .pairs
        .par_iter()
        .filter(|p| p.weight > 0.0)
        .map(|p| {
            let e = pair_errors(m, p.row_set.indices(), p.col_set.indices());
            (p.weight * e.b_err, p.weight * e.d_err)
        })
        .collect();
    let b = compensated_sum(terms.iter().map(|t| t.0)) / dist.zeta;
    let d = compensated_sum(terms.iter().map(|t| t.1)) / dist.zeta;
    report.b_err_expected = Some(b);
    report.d_err_expected = Some(d);
    report.total_expected = Some(b + d);
    report.estimation_mode = EstimationMode::Exact;
    Ok(report)
}

/// Monte-Carlo expected errors from `samples` exact volume-sampling draws.
///
/// Draws come from [`FactoredSampler`], so only the `C(n, k)` column sets
/// are enumerated and the pair cap does not apply.
pub fn expected_errors_mc(m: &Matrix, r: usize, k: usize, samples: usize, seed: u64) -> Result<BoundReport> {
    expected_errors_mc_with_cap(m, r, k, samples, seed, Some(DEFAULT_ENUMERATION_CAP))
}

pub fn expected_errors_mc_with_cap(
    m: &Matrix,
    r: usize,
    k: usize,
    samples: usize,
    seed: u64,
    cap: Option<u128>,
) -> Result<BoundReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte-Carlo needs at least one sample".into()));
    }
    let mut report = bound_suite(m, r, k)?;
    let mut sampler = FactoredSampler::with_cap(m, r, k, cap)?;
    let draws = sampler.sample(seed, samples);
    let errs: Vec<(f64, f64)> = draws
        .par_iter()
        .map(|(i, j)| {
            let e = pair_errors(m, i.indices(), j.indices());
            (e.b_err, e.d_err)
        })
        .collect();
    let (b_mean, b_se) = mean_and_std_error(errs.iter().map(|e| e.0));
    let (d_mean, d_se) = mean_and_std_error(errs.iter().map(|e| e.1));
    let (t_mean, t_se) = mean_and_std_error(errs.iter().map(|e| e.0 + e.1));
    report.b_err_expected = Some(b_mean);
    report.d_err_expected = Some(d_mean);
    report.total_expected = Some(t_mean);
    report.estimation_mode = EstimationMode::MonteCarlo {
        samples: samples as u64,
        seed,
        b_std_error: b_se,
        d_std_error: d_se,
        total_std_error: t_se,
    };
    Ok(report)
}

/// Sample mean and `sqrt(s² / N)` with the unbiased sample variance `s²`.
fn mean_and_std_error(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = compensated_sum(values.clone()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
