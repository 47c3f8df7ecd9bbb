//! Seeded random sampling of exact rational points and floating test points.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{q, Matrix, Q};
use crate::octonion::Octonion;

/// Deterministic generator; every sampled quantity in the crate flows from one of these.
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn int(&mut self, lo: i64, hi_inclusive: i64) -> i64 {
        self.0.random_range(lo..=hi_inclusive)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.0.random_bool(0.5)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }

    /// Small rational `n/d` with `|n| ≤ 6`, `1 ≤ d ≤ 4`.
    pub fn rational(&mut self) -> Q {
        let n = self.int(-6, 6);
        let d = self.int(1, 4);
        q(n, d)
    }
}

pub fn random_octonion(rng: &mut Rng) -> Octonion {
    Octonion::new(std::array::from_fn(|_| rng.rational()))
}

/// Random rational `rows × cols` matrix with small entries.
pub fn random_rational_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix<Q> {
    Matrix::from_fn(rows, cols, |_, _| rng.rational())
}

/// Gaussian `rows × cols` matrix scaled to unit Frobenius norm.
pub fn random_unit_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix<f64> {
    let m = Matrix::from_fn(rows, cols, |_, _| rng.normal());
    let norm = m.frobenius_norm_sq().sqrt();
    m.map(|x| x / norm)
}
