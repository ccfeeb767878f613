//! Seeded test-matrix generators.
//!
//! Every generator draws from a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and converts uniform bits to normals
//! with the ziggurat sampler of `rand_distr::StandardNormal`. Entries are
//! drawn in row-major order, so a `(rows, cols, seed)` triple fixes the
//! matrix on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;

/// The PRNG used for generation and sampling throughout the crate.
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows × cols` matrix of draws from `rng`, row-major.
pub fn gaussian_from(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// i.i.d. standard normal entries.
pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Matrix {
    gaussian_from(rows, cols, &mut rng(seed))
}

/// `L · R + noise · E` with `L` (`rows × rank`), `R` (`rank × cols`) and
/// `E` (`rows × cols`) i.i.d. standard normal, drawn in that order from one
/// stream.
pub fn low_rank_plus_noise(rows: usize, cols: usize, rank: usize, noise: f64, seed: u64) -> Matrix {
    let mut rng = rng(seed);
    let left = gaussian_from(rows, rank, &mut rng);
    let right = gaussian_from(rank, cols, &mut rng);
    let e = gaussian_from(rows, cols, &mut rng);
    left.matmul(&right).add(&e.scale(noise))
}

/// Symmetric positive definite `Gᵀ G + shift · I` with `G` square Gaussian.
pub fn spd(n: usize, shift: f64, seed: u64) -> Matrix {
    let g = gaussian(n, n, seed);
    let mut gram = g.gram();
    if shift != 0.0 {
        gram = gram.add(&Matrix::identity(n).scale(shift));
    }
    gram
}
