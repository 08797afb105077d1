//! Seeded random instance generators shared by tests, the verification
//! harness and the experiment driver.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::SymMatrix;
use crate::rng::{substream, Rng};

/// Symmetric matrix with i.i.d. uniform(−1, 1) upper triangle.
pub fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
    let mut rng = substream(seed, "random-symmetric", n as u64);
    SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `MMᵀ` for an `n×rank` standard Gaussian `M`.
pub fn gaussian_psd(n: usize, rank: usize, rng: &mut Rng) -> SymMatrix {
    let m: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..rank).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    SymMatrix::from_fn(n, |i, j| crate::linalg::dot(&m[i], &m[j]))
}

/// Random PSD matrix of random rank in `[1, n]`, scaled so `‖A‖_max = 1`.
///
/// The entries lie in `[−1, 1]`, which is what the additive PTAS requires.
pub fn random_psd_unit_entries(n: usize, rng: &mut Rng) -> SymMatrix {
    let rank = rng.random_range(1..=n);
    let a = gaussian_psd(n, rank, rng);
    let scale = a.max_abs();
    a.scaled(1.0 / scale)
}
