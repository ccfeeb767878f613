mod common;

use common::{dense, det, gram, matmul, rel_diff, select, solve, transpose};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use volcur::bordered::{add_both_identity, add_column_identity, add_row_identity, gram_increment};
use volcur::generate::{gaussian_from, rng};
use volcur::Matrix;

/// `‖(I − A(AᵀA)⁻¹Aᵀ) b‖²` via the normal equations.
fn projection_residual(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let bcol: Vec<Vec<f64>> = b.iter().map(|&v| vec![v]).collect();
    let coef = solve(&gram(&a.to_vec()), &matmul(&transpose(&a.to_vec()), &bcol));
    let fit = matmul(&a.to_vec(), &coef);
    b.iter().zip(&fit).map(|(v, f)| (v - f[0]).powi(2)).sum()
}

fn instance(seed: u64) -> (Matrix, Vec<f64>, Vec<f64>, f64) {
    let mut g = rng(seed);
    let r = g.random_range(1..=8usize);
    let k = g.random_range(1..=r);
    let a = gaussian_from(r, k, &mut g);
    let b = (0..r).map(|_| g.sample(StandardNormal)).collect();
    let c = (0..k).map(|_| g.sample(StandardNormal)).collect();
    (a, b, c, g.sample(StandardNormal))
}

#[test]
fn add_column_against_oracle() {
    for seed in 0..300 {
        let (a, b, _, _) = instance(seed);
        let res = add_column_identity(&a, &b).unwrap();
        let ad = dense(&a);
        let ab = dense(&a.with_column(&b).unwrap());
        let lhs = det(&gram(&ab));
        let rhs = det(&gram(&ad)) * projection_residual(&ad, &b);
        // r = k puts b in the range of A, so both sides vanish up to rounding
        assert!((res.lhs - lhs).abs() <= 1e-9 * res.scale, "seed {seed}");
        assert!(
            (res.rhs - rhs).abs() <= 1e-9 * res.scale,
            "seed {seed}: {} vs {rhs}",
            res.rhs
        );
        assert!(res.relative_residual() < 1e-9, "seed {seed}");
    }
}

#[test]
fn add_row_against_oracle() {
    for seed in 0..300 {
        let (a, _, c, _) = instance(seed);
        let res = add_row_identity(&a, &c).unwrap();
        let ad = dense(&a);
        let g = gram(&ad);
        let ccol: Vec<Vec<f64>> = c.iter().map(|&v| vec![v]).collect();
        let quad: f64 = solve(&g, &ccol).iter().zip(&c).map(|(x, v)| x[0] * v).sum();
        assert!(rel_diff(res.lhs, det(&gram(&dense(&a.with_row(&c).unwrap())))) < 1e-9);
        assert!(rel_diff(res.rhs, det(&g) * (1.0 + quad)) < 1e-8, "seed {seed}");
    }
}

#[test]
fn add_both_against_oracle() {
    for seed in 0..300 {
        let (a, b, c, d) = instance(seed);
        let res = add_both_identity(&a, &b, &c, d).unwrap();
        let x = Matrix::bordered(&a, &b, &c, d).unwrap();
        assert!(rel_diff(res.lhs, det(&gram(&dense(&x)))) < 1e-9, "seed {seed}");
        assert!(res.relative_residual() < 1e-9, "seed {seed}");
    }
}

#[test]
fn add_both_with_zero_row_is_add_column_plus_corner() {
    for seed in 0..100 {
        let (a, b, c, d) = instance(seed);
        let zero = vec![0.0; c.len()];
        let both = add_both_identity(&a, &b, &zero, d).unwrap();
        let col = add_column_identity(&a, &b).unwrap();
        let gdet = det(&gram(&dense(&a)));
        assert!(rel_diff(both.rhs, col.rhs + gdet * d * d) < 1e-9, "seed {seed}");
    }
}

#[test]
fn rank_deficient_block_is_refused() {
    let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
    assert!(add_column_identity(&a, &[1.0, 0.0, 0.0]).is_err());
    assert!(add_row_identity(&a, &[1.0, 1.0]).is_err());
}

#[test]
fn gram_increment_against_oracle() {
    for seed in 0..100 {
        let mut g = rng(1000 + seed);
        let cols = g.random_range(1..=5usize);
        let rows = g.random_range(cols + 1..=8);
        let x = gaussian_from(rows, cols, &mut g);
        let xd = dense(&x);
        let top: Vec<usize> = (0..rows - 1).collect();
        let all: Vec<usize> = (0..cols).collect();
        let inc = det(&gram(&xd)) - det(&gram(&select(&xd, &top, &all)));
        let res = gram_increment(&x).unwrap();
        assert!((res.increment - inc).abs() <= 1e-9 * res.scale, "seed {seed}");
        assert!(res.relative_residual() < 1e-9, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bordered_identities_hold(seed in any::<u64>()) {
        let (a, b, c, d) = instance(seed);
        let sv = volcur::linalg::svd(&a).unwrap();
        prop_assume!(sv.sigma_min() > 1e-6 * sv.sigma_max());
        prop_assert!(add_column_identity(&a, &b).unwrap().relative_residual() < 1e-9);
        prop_assert!(add_row_identity(&a, &c).unwrap().relative_residual() < 1e-9);
        prop_assert!(add_both_identity(&a, &b, &c, d).unwrap().relative_residual() < 1e-9);
    }

    #[test]
    fn column_in_span_has_zero_volume(seed in any::<u64>(), w in prop::collection::vec(-3.0f64..3.0, 1..5)) {
        let mut g = rng(seed);
        let k = w.len();
        let r = g.random_range(k..=8usize);
        let a = gaussian_from(r, k, &mut g);
        let b = a.apply(&w);
        let res = add_column_identity(&a, &b).unwrap();
        prop_assert!(res.rhs.abs() <= 1e-9 * res.scale);
        prop_assert!(res.relative_residual() < 1e-9);
    }
}
