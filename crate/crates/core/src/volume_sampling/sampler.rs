//! Exact volume sampling without enumerating `S_r(m) × S_k(n)`.
//!
//! The law factors as
//!
//! 1. `J` with probability `∝ det(M[:,J]ᵀ M[:,J])` (Cauchy–Binet summed
//!    over `I`), drawn from an enumerated table of `C(n, k)` weights;
//! 2. a core row set `K`, `|K| = k`, with probability `∝ det(M[K,J])²`,
//!    drawn sequentially from an orthonormal basis of `range(M[:,J])`;
//! 3. `I = K ∪ T` with `T` a uniform `(r−k)`-subset of the other rows.
//!
//! Summing step 3 over the `K ⊆ I` recovers `det(M[I,J]ᵀ M[I,J])`, so the
//! pair `(I, J)` has exactly the volume-sampling law.

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;

use super::check_dims;
use crate::compound::gram_volume;
use crate::error::{Error, Result};
use crate::generate::Rng64;
use crate::linalg::{svd, Matrix};
use crate::subsets::{binomial, subsets_vec, IndexSet, DEFAULT_ENUMERATION_CAP};

pub struct FactoredSampler {
    m: Matrix,
    r: usize,
    k: usize,
    col_sets: Vec<IndexSet>,
    col_cumulative: Vec<f64>,
    bases: HashMap<usize, Matrix>,
}

impl FactoredSampler {
    pub fn new(m: &Matrix, r: usize, k: usize) -> Result<Self> {
        Self::with_cap(m, r, k, Some(DEFAULT_ENUMERATION_CAP))
    }

    /// `cap` bounds the number of column subsets `C(n, k)`.
    pub fn with_cap(m: &Matrix, r: usize, k: usize, cap: Option<u128>) -> Result<Self> {
        let (rows, cols) = m.shape();
        check_dims(rows, cols, r, k)?;
        let count = binomial(cols as u64, k as u64)?;
        if let Some(cap) = cap {
            if count > cap {
                return Err(Error::TooLarge { requested: count, cap });
            }
        }
        let all_rows: Vec<usize> = (0..rows).collect();
        let col_sets = subsets_vec(cols, k)?;
        let mut acc = 0.0;
        let col_cumulative: Vec<f64> = col_sets
            .iter()
            .map(|j| {
                acc += gram_volume(&m.select(&all_rows, j.indices()));
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::Degenerate(format!(
                "every set of {k} columns has zero volume; rank(M) < {k}"
            )));
        }
        Ok(Self {
            m: m.clone(),
            r,
            k,
            col_sets,
            col_cumulative,
            bases: HashMap::new(),
        })
    }

    fn pick_columns(&self, rng: &mut Rng64) -> usize {
        let total = *self.col_cumulative.last().expect("non-empty");
        let target = rng.random::<f64>() * total;
        let pos = self.col_cumulative.partition_point(|&c| c <= target);
        pos.min(self.col_cumulative.len() - 1)
    }

    fn basis(&mut self, col_pos: usize) -> &Matrix {
        let m = &self.m;
        let cols = self.col_sets[col_pos].indices();
        self.bases.entry(col_pos).or_insert_with(|| {
            let c = m.select(&(0..m.rows()).collect::<Vec<_>>(), cols);
            svd(&c).expect("finite").left_vectors
        })
    }

    /// One draw of `(I, J)`.
    pub fn sample_pair(&mut self, rng: &mut Rng64) -> (IndexSet, IndexSet) {
        let col_pos = self.pick_columns(rng);
        let (rows, r, k) = (self.m.rows(), self.r, self.k);
        let basis = self.basis(col_pos).clone();
        let core = projection_sample(basis, rng);
        let mut taken = vec![false; rows];
        for &i in &core {
            taken[i] = true;
        }
        let rest: Vec<usize> = (0..rows).filter(|&i| !taken[i]).collect();
        let mut chosen = core;
        chosen.extend(index::sample(rng, rest.len(), r - k).into_iter().map(|p| rest[p]));
        chosen.sort_unstable();
        let row_set = IndexSet::new(chosen, rows).expect("distinct sorted rows");
        (row_set, self.col_sets[col_pos].clone())
    }

    /// `count` i.i.d. draws from a stream seeded with `seed`.
    pub fn sample(&mut self, seed: u64, count: usize) -> Vec<(IndexSet, IndexSet)> {
        let mut rng = crate::generate::rng(seed);
        (0..count).map(|_| self.sample_pair(&mut rng)).collect()
    }
}

/// Draws `K` with `P(K) = det(Q[K,:])²` for `Q` with orthonormal columns.
fn projection_sample(mut q: Matrix, rng: &mut Rng64) -> Vec<usize> {
    let rows = q.rows();
    let mut picked = Vec::with_capacity(q.cols());
    while q.cols() > 0 {
        let norms: Vec<f64> = (0..rows).map(|i| q.row(i).iter().map(|v| v * v).sum()).collect();
        let total: f64 = norms.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut row = rows - 1;
        for (i, &w) in norms.iter().enumerate() {
            if target < w {
                row = i;
                break;
            }
            target -= w;
        }
        while norms[row] <= 0.0 && row > 0 {
            row -= 1;
        }
        picked.push(row);
        q = eliminate_row(&q, row);
    }
    picked.sort_unstable();
    picked
}

/// Orthonormal basis of `{ v ∈ range(q) : v[row] = 0 }`, one column fewer.
fn eliminate_row(q: &Matrix, row: usize) -> Matrix {
    let (rows, cols) = q.shape();
    let qrow = q.row(row);
    let pivot = (0..cols)
        .max_by(|&a, &b| qrow[a].abs().total_cmp(&qrow[b].abs()))
        .expect("at least one column");
    let mut columns: Vec<Vec<f64>> = (0..cols)
        .filter(|&j| j != pivot)
        .map(|j| {
            let f = qrow[j] / qrow[pivot];
            (0..rows).map(|i| q.get(i, j) - f * q.get(i, pivot)).collect()
        })
        .collect();
    // modified Gram–Schmidt, twice for stability
    for _ in 0..2 {
        for a in 0..columns.len() {
            for b in 0..a {
                let proj: f64 = columns[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum();
                let (head, tail) = columns.split_at_mut(a);
                for (x, y) in tail[0].iter_mut().zip(&head[b]) {
                    *x -= proj * y;
                }
            }
            let norm = columns[a].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                columns[a].iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
    Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
}
