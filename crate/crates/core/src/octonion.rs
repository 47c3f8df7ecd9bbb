//! Exact octonion arithmetic.
//!
//! The multiplication is read off the matrix of right multiplication
//! `[R_u]`, defined by `[R_u][v] = [v u]`. Entry `(i, j)` of `[R_u]` is
//! `±a_m` for a fixed sign and unit index `m`; that signed index table is the
//! only place the algebra structure is encoded.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::linalg::{to_f64, Matrix, Q};

/// `(sign, unit index)` pattern of `[R_u]`: row `i`, column `j` holds
/// `sign * a_index`.
const R_TABLE: [[(i8, u8); 8]; 8] = [
    [(1, 0), (-1, 1), (-1, 2), (-1, 3), (-1, 4), (-1, 5), (-1, 6), (-1, 7)],
    [(1, 1), (1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (-1, 7), (1, 6)],
    [(1, 2), (-1, 3), (1, 0), (1, 1), (1, 6), (1, 7), (-1, 4), (-1, 5)],
    [(1, 3), (1, 2), (-1, 1), (1, 0), (1, 7), (-1, 6), (1, 5), (-1, 4)],
    [(1, 4), (-1, 5), (-1, 6), (-1, 7), (1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 5), (1, 4), (-1, 7), (1, 6), (-1, 1), (1, 0), (-1, 3), (1, 2)],
    [(1, 6), (1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (1, 0), (-1, 1)],
    [(1, 7), (-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (1, 0)],
];

/// Signed index table describing right multiplication. The standard table is
/// the one used everywhere; other tables exist only to exercise the
/// verification suite against a deliberately broken algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulTable {
    entries: [[(i8, u8); 8]; 8],
}

impl Default for MulTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl MulTable {
    pub fn standard() -> Self {
        Self { entries: R_TABLE }
    }

    /// Standard table with the sign of entry `(row, col)` flipped.
    pub fn with_flipped_sign(row: usize, col: usize) -> Self {
        let mut entries = R_TABLE;
        entries[row][col].0 = -entries[row][col].0;
        Self { entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> (i8, usize) {
        let (s, m) = self.entries[row][col];
        (s, m as usize)
    }

    /// Integer matrix `[R_{e_m}]`.
    pub fn unit_right_matrix(&self, m: usize) -> Matrix<i64> {
        Matrix::from_fn(8, 8, |i, j| {
            let (s, idx) = self.entry(i, j);
            if idx == m {
                i64::from(s)
            } else {
                0
            }
        })
    }

    /// `[R_u]` for an arbitrary octonion `u`.
    pub fn right_mult_matrix(&self, u: &Octonion) -> Matrix<Q> {
        Matrix::from_fn(8, 8, |i, j| {
            let (s, idx) = self.entry(i, j);
            signed(s, &u.coords[idx])
        })
    }

    /// `a b` under this table: `[a b] = [R_b][a]`.
    pub fn mul(&self, a: &Octonion, b: &Octonion) -> Octonion {
        let mut out: [Q; 8] = Default::default();
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Q::zero();
            for (j, aj) in a.coords.iter().enumerate() {
                if aj.is_zero() {
                    continue;
                }
                let (s, idx) = self.entry(i, j);
                let bj = &b.coords[idx];
                if bj.is_zero() {
                    continue;
                }
                let term = aj * bj;
                if s > 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            *slot = acc;
        }
        Octonion { coords: out }
    }
}

fn signed(s: i8, x: &Q) -> Q {
    if s > 0 {
        x.clone()
    } else {
        -x.clone()
    }
}

/// An octonion `Σ a_i e_i` with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Octonion {
    pub coords: [Q; 8],
}

impl fmt::Debug for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "O({})", parts.join(", "))
    }
}

impl Octonion {
    pub fn new(coords: [Q; 8]) -> Self {
        Self { coords }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit `e_i`; `e_0` is the identity.
    pub fn unit(i: usize) -> Self {
        assert!(i < 8, "octonion unit index {i} out of range");
        let mut o = Self::zero();
        o.coords[i] = Q::one();
        o
    }

    pub fn from_slice(coords: &[Q]) -> Self {
        assert_eq!(coords.len(), 8, "octonion needs 8 coordinates");
        Self {
            coords: std::array::from_fn(|i| coords[i].clone()),
        }
    }

    pub fn re(&self) -> &Q {
        &self.coords[0]
    }

    pub fn conj(&self) -> Self {
        Self {
            coords: std::array::from_fn(|i| {
                if i == 0 {
                    self.coords[0].clone()
                } else {
                    -self.coords[i].clone()
                }
            }),
        }
    }

    /// `⟨a, b⟩ = Re(ā b)`, which is the coordinate dot product.
    pub fn inner(&self, other: &Self) -> Q {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> Q {
        self.inner(self)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self {
            coords: std::array::from_fn(|i| &self.coords[i] * s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// `[R_self]` under the standard table.
    pub fn right_mult_matrix(&self) -> Matrix<Q> {
        MulTable::standard().right_mult_matrix(self)
    }

    pub fn to_f64(&self) -> [f64; 8] {
        std::array::from_fn(|i| to_f64(&self.coords[i]))
    }
}

impl Mul for &Octonion {
    type Output = Octonion;

    fn mul(self, rhs: &Octonion) -> Octonion {
        MulTable::standard().mul(self, rhs)
    }
}

impl Add for &Octonion {
    type Output = Octonion;

    fn add(self, rhs: &Octonion) -> Octonion {
        Octonion {
            coords: std::array::from_fn(|i| &self.coords[i] + &rhs.coords[i]),
        }
    }
}

impl Sub for &Octonion {
    type Output = Octonion;

    fn sub(self, rhs: &Octonion) -> Octonion {
        Octonion {
            coords: std::array::from_fn(|i| &self.coords[i] - &rhs.coords[i]),
        }
    }
}

impl Neg for &Octonion {
    type Output = Octonion;

    fn neg(self) -> Octonion {
        Octonion {
            coords: std::array::from_fn(|i| -self.coords[i].clone()),
        }
    }
}

/// A vector `x ∈ O^k`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct OctonionVector {
    entries: Vec<Octonion>,
}

impl OctonionVector {
    pub fn new(entries: Vec<Octonion>) -> Self {
        assert!(!entries.is_empty(), "octonion vector needs k >= 1 entries");
        Self { entries }
    }

    pub fn entries(&self) -> &[Octonion] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `‖x‖² = Σ |x_i|²`.
    pub fn norm_sq(&self) -> Q {
        self.entries.iter().map(Octonion::norm_sq).sum()
    }

    /// The octonion-valued pairing `(x, y) = Σ x̄_i y_i`.
    pub fn pairing(&self, other: &Self) -> Octonion {
        assert_eq!(self.len(), other.len(), "pairing length mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Octonion::zero(), |acc, (x, y)| &acc + &(&x.conj() * y))
    }
}
