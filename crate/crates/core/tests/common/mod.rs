//! Reference implementations used as test oracles. Deliberately naive and
//! independent of the library: dense `Vec<Vec<f64>>`, complete-pivoting
//! elimination, cyclic Jacobi eigenvalues and brute-force enumeration.

#![allow(dead_code, clippy::needless_range_loop)]

use volcur::Matrix;

pub type Dense = Vec<Vec<f64>>;

pub fn dense(m: &Matrix) -> Dense {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

pub fn select(m: &Dense, rows: &[usize], cols: &[usize]) -> Dense {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect()
}

pub fn transpose(m: &Dense) -> Dense {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|t| row[t] * b[t][j]).sum()).collect())
        .collect()
}

pub fn gram(a: &Dense) -> Dense {
    matmul(&transpose(a), a)
}

/// Determinant by Gaussian elimination with complete pivoting.
pub fn det(a: &Dense) -> f64 {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = 1.0;
    for p in 0..n {
        let (mut bi, mut bj, mut best) = (p, p, 0.0);
        for i in p..n {
            for j in p..n {
                if m[i][j].abs() > best {
                    best = m[i][j].abs();
                    bi = i;
                    bj = j;
                }
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if bi != p {
            m.swap(bi, p);
            sign = -sign;
        }
        if bj != p {
            for row in m.iter_mut() {
                row.swap(bj, p);
            }
            sign = -sign;
        }
        for i in p + 1..n {
            let f = m[i][p] / m[p][p];
            for j in p..n {
                m[i][j] -= f * m[p][j];
            }
        }
    }
    sign * (0..n).map(|i| m[i][i]).product::<f64>()
}

/// Solves `a x = b` column by column with complete-pivoting elimination.
pub fn solve(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let nrhs = b.first().map_or(0, Vec::len);
    let mut m: Dense = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).copied().collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for p in 0..n {
        let (mut bi, mut bj, mut best) = (p, p, 0.0);
        for i in p..n {
            for j in p..n {
                if m[i][j].abs() > best {
                    best = m[i][j].abs();
                    bi = i;
                    bj = j;
                }
            }
        }
        assert!(best > 0.0, "singular system");
        m.swap(bi, p);
        for row in m.iter_mut() {
            row.swap(bj, p);
        }
        perm.swap(bj, p);
        for i in 0..n {
            if i != p {
                let f = m[i][p] / m[p][p];
                for j in p..n + nrhs {
                    m[i][j] -= f * m[p][j];
                }
            }
        }
    }
    let mut x = vec![vec![0.0; nrhs]; n];
    for p in 0..n {
        for c in 0..nrhs {
            x[perm[p]][c] = m[p][n + c] / m[p][p];
        }
    }
    x
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(s: &Dense) -> Vec<f64> {
    let n = s.len();
    let mut a = s.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Squared singular values of `m`, descending, from Jacobi on the smaller Gram.
pub fn squared_singular_values(m: &Dense) -> Vec<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let g = if rows >= cols { gram(m) } else { gram(&transpose(m)) };
    let mut ev: Vec<f64> = jacobi_eigenvalues(&g).into_iter().map(|v| v.max(0.0)).collect();
    ev.reverse();
    ev
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// `e_k` of `values` as the sum of products over all `k`-subsets.
pub fn elementary_symmetric_brute(values: &[f64], k: usize) -> f64 {
    subsets(values.len(), k)
        .iter()
        .map(|s| s.iter().map(|&i| values[i]).product::<f64>())
        .sum()
}

/// `‖C_k(m)‖_F²` as the sum of squared `k × k` minors.
pub fn compound_norm_sq_brute(m: &Dense, k: usize) -> f64 {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut total = 0.0;
    for i in subsets(rows, k) {
        for j in subsets(cols, k) {
            total += det(&select(m, &i, &j)).powi(2);
        }
    }
    total
}

/// `(b_err, d_err)` of the CUR approximation with `U = (AᵀA)⁻¹ Aᵀ`.
pub fn cur_errors(m: &Dense, rows: &[usize], cols: &[usize]) -> (f64, f64) {
    let all_cols: Vec<usize> = (0..m[0].len()).collect();
    let a = select(m, rows, cols);
    let r = select(m, rows, &all_cols);
    let coef = solve(&gram(&a), &matmul(&transpose(&a), &r));
    let (mut b, mut d) = (0.0, 0.0);
    for (t, mrow) in m.iter().enumerate() {
        for s in (0..mrow.len()).filter(|s| !cols.contains(s)) {
            let approx: f64 = cols.iter().enumerate().map(|(l, &j)| mrow[j] * coef[l][s]).sum();
            let e = (approx - mrow[s]).powi(2);
            if rows.contains(&t) {
                b += e;
            } else {
                d += e;
            }
        }
    }
    (b, d)
}

pub struct BruteExpectation {
    pub zeta: f64,
    pub b_err: f64,
    pub d_err: f64,
    /// `(I, J, unnormalised weight)` in lexicographic `(I, J)` order.
    pub weights: Vec<(Vec<usize>, Vec<usize>, f64)>,
}

/// Enumerates every `(I, J)` with `|I| = r`, `|J| = k` and weight
/// `det(AᵀA)`. Pairs whose weight is below `1e-13` of the largest carry
/// no probability mass worth resolving and are left out of the errors.
pub fn brute_expectation(m: &Dense, r: usize, k: usize) -> BruteExpectation {
    let rows = m.len();
    let cols = m[0].len();
    let mut weights = Vec::new();
    for i in subsets(rows, r) {
        for j in subsets(cols, k) {
            let w = det(&gram(&select(m, &i, &j))).max(0.0);
            weights.push((i.clone(), j, w));
        }
    }
    let zeta: f64 = weights.iter().map(|t| t.2).sum();
    let wmax = weights.iter().map(|t| t.2).fold(0.0, f64::max);
    let (mut b, mut d) = (0.0, 0.0);
    for (i, j, w) in &weights {
        if *w > 1e-13 * wmax {
            let (eb, ed) = cur_errors(m, i, j);
            b += w * eb;
            d += w * ed;
        }
    }
    BruteExpectation {
        zeta,
        b_err: b / zeta,
        d_err: d / zeta,
        weights,
    }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let denom = a.abs().max(b.abs());
    if denom == 0.0 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}
