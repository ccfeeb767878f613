use rand::Rng;
use rayon::prelude::*;

use super::{check_dims, compensated_sum};
use crate::compound::{compound_norm_sq, gram_volume};
use crate::error::{Error, Result};
use crate::generate::rng;
use crate::linalg::Matrix;
use crate::subsets::{binomial, check_pair_enumeration, subsets_vec, IndexSet, DEFAULT_ENUMERATION_CAP};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPair {
    pub row_set: IndexSet,
    pub col_set: IndexSet,
    /// `det(M[I,J]ᵀ M[I,J])`.
    pub weight: f64,
}

/// The volume-sampling law over `S_r(m) × S_k(n)`, fully enumerated.
///
/// Pairs are stored in lexicographic order of `I`, then `J`.
#[derive(Clone, Debug)]
pub struct SubsetDistribution {
    pub pairs: Vec<WeightedPair>,
    /// Sum of all weights.
    pub zeta: f64,
    /// `(m, n, r, k)`.
    pub dims: (usize, usize, usize, usize),
    cumulative: Vec<f64>,
}

impl SubsetDistribution {
    pub fn probability(&self, index: usize) -> f64 {
        self.pairs[index].weight / self.zeta
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.weight / self.zeta).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Position of `(rows, cols)` in the pair list.
    pub fn index_of(&self, rows: &IndexSet, cols: &IndexSet) -> Option<usize> {
        self.pairs
            .binary_search_by(|p| (&p.row_set, &p.col_set).cmp(&(rows, cols)))
            .ok()
    }

    /// Inverts the cumulative weights at `u ∈ [0, 1)`.
    fn locate(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let target = u * total;
        let pos = self.cumulative.partition_point(|&c| c <= target);
        if pos < self.cumulative.len() {
            return pos;
        }
        // u * total rounded up to total: take the last pair with weight
        self.pairs.iter().rposition(|p| p.weight > 0.0).expect("non-degenerate")
    }
}

/// Enumerates the distribution under the default pair cap.
pub fn build_distribution(m: &Matrix, r: usize, k: usize) -> Result<SubsetDistribution> {
    build_distribution_with_cap(m, r, k, Some(DEFAULT_ENUMERATION_CAP))
}

/// Enumerates the distribution; `cap = None` lifts the enumeration guard.
pub fn build_distribution_with_cap(m: &Matrix, r: usize, k: usize, cap: Option<u128>) -> Result<SubsetDistribution> {
    let (rows, cols) = m.shape();
    check_dims(rows, cols, r, k)?;
    check_pair_enumeration(rows, r, cols, k, cap)?;
    let row_sets = subsets_vec(rows, r)?;
    let col_sets = subsets_vec(cols, k)?;
    let pairs: Vec<WeightedPair> = row_sets
        .par_iter()
        .flat_map_iter(|rs| {
            col_sets.iter().map(move |cs| WeightedPair {
                row_set: rs.clone(),
                col_set: cs.clone(),
                weight: gram_volume(&m.select(rs.indices(), cs.indices())),
            })
        })
        .collect();

    let mut cumulative = Vec::with_capacity(pairs.len());
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for p in &pairs {
        let t = sum + p.weight;
        comp += if sum.abs() >= p.weight.abs() {
            (sum - t) + p.weight
        } else {
            (p.weight - t) + sum
        };
        sum = t;
        cumulative.push(sum + comp);
    }
    let zeta = compensated_sum(pairs.iter().map(|p| p.weight));
    if !(zeta > 0.0) {
        return Err(Error::Degenerate(format!(
            "every {r}x{k} submatrix has zero volume; rank(M) < {k}"
        )));
    }
    Ok(SubsetDistribution {
        pairs,
        zeta,
        dims: (rows, cols, r, k),
        cumulative,
    })
}

/// `ζ = C(m−k, r−k) · ‖C_k(M)‖_F²` from the singular values; no enumeration.
pub fn zeta_closed_form(m: &Matrix, r: usize, k: usize) -> Result<f64> {
    let (rows, cols) = m.shape();
    check_dims(rows, cols, r, k)?;
    let count = binomial((rows - k) as u64, (r - k) as u64)?;
    Ok(count as f64 * compound_norm_sq(m, k)?)
}

/// Draws `count` pair indices i.i.d. from `dist`.
pub fn sample_indices(dist: &SubsetDistribution, seed: u64, count: usize) -> Result<Vec<usize>> {
    if dist.is_empty() || !(dist.zeta > 0.0) {
        return Err(Error::Degenerate("cannot sample from an empty distribution".into()));
    }
    let mut rng = rng(seed);
    Ok((0..count).map(|_| dist.locate(rng.random::<f64>())).collect())
}

/// Draws `count` pairs i.i.d. from `dist`; deterministic given `seed`.
pub fn sample(dist: &SubsetDistribution, seed: u64, count: usize) -> Result<Vec<(IndexSet, IndexSet)>> {
    Ok(sample_indices(dist, seed, count)?
        .into_iter()
        .map(|i| (dist.pairs[i].row_set.clone(), dist.pairs[i].col_set.clone()))
        .collect())
}

/// Half the L1 distance between the empirical law of `draws` (indices into
/// `probabilities`) and `probabilities`.
pub fn total_variation(probabilities: &[f64], draws: &[usize]) -> f64 {
    let mut counts = vec![0usize; probabilities.len()];
    for &d in draws {
        counts[d] += 1;
    }
    let n = draws.len().max(1) as f64;
    0.5 * probabilities
        .iter()
        .zip(&counts)
        .map(|(p, &c)| (c as f64 / n - p).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gaussian;

    fn three_by_two() -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap()
    }

    #[test]
    fn zeta_small_instance() {
        let m = three_by_two();
        let dist = build_distribution(&m, 2, 1).unwrap();
        assert_eq!(dist.len(), 6);
        assert!((dist.zeta - 4.0).abs() < 1e-14);
        assert!((zeta_closed_form(&m, 2, 1).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_identity() {
        let i3 = Matrix::identity(3);
        assert!((zeta_closed_form(&i3, 1, 1).unwrap() - 3.0).abs() < 1e-14);
        assert!((zeta_closed_form(&i3, 2, 1).unwrap() - 6.0).abs() < 1e-14);
        let dist = build_distribution(&i3, 2, 1).unwrap();
        assert_eq!(dist.pairs.iter().filter(|p| p.weight == 1.0).count(), 6);
        assert!((dist.zeta - 6.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_random_matches_enumeration() {
        let m = gaussian(6, 4, 21);
        let dist = build_distribution(&m, 3, 2).unwrap();
        let closed = zeta_closed_form(&m, 3, 2).unwrap();
        assert!((dist.zeta - closed).abs() <= 1e-9 * closed);
    }

    #[test]
    fn rank_one_is_degenerate() {
        let m = Matrix::from_fn(4, 3, |i, j| ((i + 1) * (j + 2)) as f64);
        assert!(matches!(build_distribution(&m, 2, 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn guard_and_dims() {
        let m = gaussian(30, 12, 0);
        assert!(matches!(build_distribution(&m, 15, 6), Err(Error::TooLarge { .. })));
        assert!(build_distribution(&gaussian(3, 3, 0), 1, 2).is_err());
    }

    #[test]
    fn single_pair_distribution() {
        let m = Matrix::from_rows(&[[2.0]]).unwrap();
        let dist = build_distribution(&m, 1, 1).unwrap();
        let draws = sample(&dist, 5, 10).unwrap();
        assert!(draws.iter().all(|(i, j)| i.indices() == [0] && j.indices() == [0]));
    }

    #[test]
    fn identity_draws_only_diagonal() {
        let dist = build_distribution(&Matrix::identity(3), 1, 1).unwrap();
        for (i, j) in sample(&dist, 17, 2000).unwrap() {
            assert_eq!(i.indices(), j.indices());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let dist = build_distribution(&gaussian(4, 3, 2), 2, 1).unwrap();
        assert_eq!(
            sample_indices(&dist, 9, 100).unwrap(),
            sample_indices(&dist, 9, 100).unwrap()
        );
        assert_ne!(
            sample_indices(&dist, 9, 100).unwrap(),
            sample_indices(&dist, 10, 100).unwrap()
        );
    }

    #[test]
    fn index_lookup() {
        let dist = build_distribution(&gaussian(4, 3, 2), 2, 1).unwrap();
        for (pos, p) in dist.pairs.iter().enumerate() {
            assert_eq!(dist.index_of(&p.row_set, &p.col_set), Some(pos));
        }
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[0.5, 0.5], &[0, 1]), 0.0);
        assert_eq!(total_variation(&[0.5, 0.5], &[0, 0]), 0.5);
    }
}
