//! Seeded test-matrix generators.
//!
//! All randomness flows through [`Rng64`], a PCG-XSL-RR 128/64 generator
//! (`rand_pcg::Pcg64`). Its output stream is fixed by the seed and does not
//! depend on the platform, so every generator below is reproducible.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::linalg::{thin_q, LowRankFactors};
use crate::matrix::DenseMatrix;

pub type Rng64 = rand_pcg::Pcg64;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut Rng64, n_rows: usize, n_cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n_rows, n_cols, |_, _| StandardNormal.sample(rng))
}

pub fn uniform_matrix(rng: &mut Rng64, n_rows: usize, n_cols: usize, low: f64, high: f64) -> DenseMatrix {
    let dist = Uniform::new(low, high).expect("low < high");
    DenseMatrix::from_fn(n_rows, n_cols, |_, _| dist.sample(rng))
}

pub fn uniform_vec(rng: &mut Rng64, len: usize, low: f64, high: f64) -> Vec<f64> {
    let dist = Uniform::new(low, high).expect("low < high");
    (0..len).map(|_| dist.sample(rng)).collect()
}

/// `n x k` matrix with orthonormal columns spanning a Gaussian subspace.
pub fn random_orthonormal(rng: &mut Rng64, n: usize, k: usize) -> DenseMatrix {
    thin_q(&gaussian_matrix(rng, n, k))
}

/// Product `G_1 G_2` of Gaussian `n x rank` and `rank x m` factors.
pub fn random_low_rank(rng: &mut Rng64, n: usize, m: usize, rank: usize) -> DenseMatrix {
    let left = gaussian_matrix(rng, n, rank);
    let right = gaussian_matrix(rng, rank, m);
    left.matmul(&right).expect("inner dimensions agree")
}

/// Tall `n x r` matrix `Q_1 diag(s) Q_2ᵀ` whose singular values decay
/// geometrically from 1 down to `smallest`.
pub fn geometric_spectrum_matrix(rng: &mut Rng64, n: usize, r: usize, smallest: f64) -> DenseMatrix {
    let left = random_orthonormal(rng, n, r);
    let right = random_orthonormal(rng, r, r);
    let sigma: Vec<f64> = (0..r).map(|t| if r == 1 { 1.0 } else { smallest.powf(t as f64 / (r - 1) as f64) }).collect();
    LowRankFactors { u: left, sigma, v: right }.reconstruct()
}

/// Factors for the max-element experiment: `U` and `V` are the Q factors of
/// matrices with entries uniform in `[0, 1]`, and the diagonal is uniform in
/// `[0, 1]` as well.
pub fn max_element_factors(rng: &mut Rng64, n: usize, m: usize, rank: usize) -> LowRankFactors {
    let u = thin_q(&uniform_matrix(rng, n, rank, 0.0, 1.0));
    let v = thin_q(&uniform_matrix(rng, m, rank, 0.0, 1.0));
    let sigma = uniform_vec(rng, rank, 0.0, 1.0);
    LowRankFactors { u, sigma, v }
}
