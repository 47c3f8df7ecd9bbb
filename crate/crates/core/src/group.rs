//! Exact rational elements of `Spin(9)` (acting on `R^16`) and `O(k)`, for
//! checking `q_k(g X hᵀ) = q_k(X)` without tolerances.

use num_traits::{One, Zero};

use crate::clifford::DIM;
use crate::error::{Error, Result};
use crate::forms::MatrixPoint;
use crate::linalg::{qi, Matrix, Q};
use crate::octonion::Octonion;
use crate::sampling::Rng;

/// `[[v I, R_u], [R_ū, −v I]]` with `|u|² + v² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinGenerator {
    u: Octonion,
    v: Q,
    matrix: Matrix<Q>,
}

impl SpinGenerator {
    pub fn new(u: Octonion, v: Q) -> Result<Self> {
        if u.norm_sq() + &v * &v != Q::one() {
            return Err(Error::InvalidArgument(format!(
                "|u|^2 + v^2 = {} != 1",
                u.norm_sq() + &v * &v
            )));
        }
        let mut matrix = Matrix::zeros(DIM, DIM);
        for i in 0..8 {
            matrix[(i, i)] = v.clone();
            matrix[(i + 8, i + 8)] = -v.clone();
        }
        matrix.set_block(0, 8, &u.right_mult_matrix());
        matrix.set_block(8, 0, &u.conj().right_mult_matrix());
        Ok(Self { u, v, matrix })
    }

    /// Inverse stereographic projection of `m ∈ Q^8` onto `S^8 ⊂ R^9`:
    /// `(u, v) = (2m, |m|² − 1) / (|m|² + 1)`.
    pub fn from_stereographic(m: &Octonion) -> Self {
        let s = m.norm_sq();
        let denom = &s + Q::one();
        let u = m.scale(&(qi(2) / &denom));
        let v = (s - Q::one()) / denom;
        Self::new(u, v).expect("stereographic points lie on the sphere")
    }

    pub fn random(rng: &mut Rng) -> Self {
        // Sparse m keeps denominators small; at least one coordinate is set.
        let mut m = Octonion::zero();
        let count = 1 + rng.index(3);
        for _ in 0..count {
            m.coords[rng.index(8)] = rng.rational();
        }
        Self::from_stereographic(&m)
    }

    pub fn u(&self) -> &Octonion {
        &self.u
    }

    pub fn v(&self) -> &Q {
        &self.v
    }

    pub fn matrix(&self) -> &Matrix<Q> {
        &self.matrix
    }
}

/// A rational point of `Spin(9)` determined by `seed`.
pub fn rational_spin9_element(seed: u64) -> SpinGenerator {
    SpinGenerator::random(&mut Rng::seeded(seed))
}

/// Small Pythagorean triples `(a, b, c)`, `a² + b² = c²`.
const TRIPLES: [(i64, i64, i64); 5] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)];

/// A rational orthogonal `k × k` matrix: a random signed permutation times a
/// few plane rotations with Pythagorean cosines and sines.
pub fn rational_orthogonal(k: usize, rng: &mut Rng) -> Matrix<Q> {
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.index(i + 1));
    }
    let mut h = Matrix::from_fn(k, k, |r, c| {
        if perm[r] == c {
            if rng.coin() {
                Q::one()
            } else {
                -Q::one()
            }
        } else {
            Q::zero()
        }
    });
    if k >= 2 {
        for _ in 0..2 {
            let p = rng.index(k);
            let mut q_ = rng.index(k - 1);
            if q_ >= p {
                q_ += 1;
            }
            let (a, b, c) = TRIPLES[rng.index(TRIPLES.len())];
            let (cos, sin) = (Q::new(a.into(), c.into()), Q::new(b.into(), c.into()));
            let mut g = Matrix::<Q>::identity(k);
            g[(p, p)] = cos.clone();
            g[(q_, q_)] = cos;
            g[(p, q_)] = -sin.clone();
            g[(q_, p)] = sin;
            h = &h * &g;
        }
    }
    h
}

/// `g X hᵀ`.
pub fn act(g: &Matrix<Q>, x: &MatrixPoint, h: &Matrix<Q>) -> MatrixPoint {
    let m = &(g * x.matrix()) * &h.transpose();
    MatrixPoint::new(m).expect("action preserves the shape")
}

pub fn is_orthogonal(m: &Matrix<Q>) -> bool {
    (&m.transpose() * m) == Matrix::identity(m.rows())
}
