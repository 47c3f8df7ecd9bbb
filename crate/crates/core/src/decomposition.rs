//! Irreducible pieces of the quadratic forms on `R^{16×k}` under
//! `Spin(9) × O(k)` and the invariant sums of squares `s_ij` attached to them.
//!
//! The `O(k)` side splits `R^{k×k}` into `U_0` (multiples of the identity),
//! `U_1` (traceless symmetric) and `U_{-1}` (skew). The pieces that carry
//! quadratic forms are the eight pairs in [`LAMBDA`], and
//!
//! ```text
//! s_ij(X) = Σ_a Σ_b tr(Xᵀ E_a X F_b)² / (‖E_a‖² ‖F_b‖²)
//! ```
//!
//! with `E_a` ranging over `{S_J : |J| = i}` and `F_b` over the orthogonal
//! basis of `U_j` below. Dividing by the squared norms makes this equal to the
//! sum over orthonormal bases while staying inside the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::clifford::{CliffordMatrix, CliffordSystem, DIM, NORM_SQ};
use crate::error::{Error, Result};
use crate::forms::MatrixPoint;
use crate::linalg::{max_abs, qi, Matrix, Scalar, Q};

/// Which `O(k)`-irreducible piece of `R^{k×k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OkSide {
    /// `U_{-1}`: skew-symmetric matrices.
    Skew,
    /// `U_0`: multiples of the identity.
    Trivial,
    /// `U_1`: traceless symmetric matrices.
    TracelessSymmetric,
}

impl OkSide {
    pub fn from_index(j: i8) -> Result<Self> {
        match j {
            -1 => Ok(Self::Skew),
            0 => Ok(Self::Trivial),
            1 => Ok(Self::TracelessSymmetric),
            _ => Err(Error::InvalidArgument(format!("O(k) side must be -1, 0 or 1, got {j}"))),
        }
    }

    pub fn index(self) -> i8 {
        match self {
            Self::Skew => -1,
            Self::Trivial => 0,
            Self::TracelessSymmetric => 1,
        }
    }

    pub fn dim(self, k: usize) -> usize {
        match self {
            Self::Skew => k * (k - 1) / 2,
            Self::Trivial => 1,
            Self::TracelessSymmetric => k * (k + 1) / 2 - 1,
        }
    }
}

/// One element of the orthogonal basis of some `U_j`, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct OkBasisElement {
    k: usize,
    /// `(row, col, coefficient)` triples.
    entries: Vec<(usize, usize, i64)>,
    norm_sq: i64,
}

impl OkBasisElement {
    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn norm_sq(&self) -> Q {
        qi(self.norm_sq)
    }

    pub fn matrix<T: Scalar + num_traits::FromPrimitive>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.k, self.k);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = T::from_i64(v).expect("small integer");
        }
        m
    }

    /// `⟨M, F⟩` for a `k × k` matrix `M` given in row-major order.
    fn contract<T: Scalar + num_traits::FromPrimitive>(&self, m: &[T]) -> T {
        self.entries.iter().fold(T::zero(), |acc, &(r, c, v)| {
            let x = m[r * self.k + c].clone();
            match v {
                1 => acc + x,
                -1 => acc - x,
                _ => acc + T::from_i64(v).expect("small integer") * x,
            }
        })
    }
}

/// Orthogonal basis of `U_j` with rational (in fact integer) squared norms.
///
/// `U_1` uses the off-diagonal `e_pq + e_qp` together with the nested traceless
/// diagonals `g_m = diag(1, …, 1, -m, 0, …, 0)` (`m` ones), `‖g_m‖² = m(m+1)`.
pub fn u_basis(side: OkSide, k: usize) -> Result<Vec<OkBasisElement>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("u_basis needs k >= 2, got {k}")));
    }
    let mut out = Vec::with_capacity(side.dim(k));
    match side {
        OkSide::Trivial => out.push(OkBasisElement {
            k,
            entries: (0..k).map(|i| (i, i, 1)).collect(),
            norm_sq: k as i64,
        }),
        OkSide::Skew | OkSide::TracelessSymmetric => {
            let s = if side == OkSide::Skew { -1 } else { 1 };
            for p in 0..k {
                for q in (p + 1)..k {
                    out.push(OkBasisElement {
                        k,
                        entries: vec![(p, q, 1), (q, p, s)],
                        norm_sq: 2,
                    });
                }
            }
            if side == OkSide::TracelessSymmetric {
                for m in 1..k {
                    let mut entries: Vec<_> = (0..m).map(|i| (i, i, 1)).collect();
                    entries.push((m, m, -(m as i64)));
                    out.push(OkBasisElement {
                        k,
                        entries,
                        norm_sq: (m * (m + 1)) as i64,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A pair `(i, j)`: Spin(9) level `i` and O(k) side `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LambdaPair {
    pub level: usize,
    pub side: OkSide,
}

impl LambdaPair {
    pub const fn new(level: usize, side: OkSide) -> Self {
        Self { level, side }
    }

    /// Validates that `(i, j)` is one of the eight pairs of [`LAMBDA`].
    pub fn from_indices(i: usize, j: i8) -> Result<Self> {
        let pair = Self::new(i, OkSide::from_index(j)?);
        if LAMBDA.contains(&pair) {
            Ok(pair)
        } else {
            Err(Error::InvalidArgument(format!("({i},{j}) is not in Lambda")))
        }
    }

    pub fn indices(self) -> (usize, i8) {
        (self.level, self.side.index())
    }

    /// Number of squares summed in `s_ij`: `C(9, i) · dim U_j`.
    pub fn generator_count(self, k: usize) -> usize {
        const BINOM9: [usize; 5] = [1, 9, 36, 84, 126];
        BINOM9[self.level] * self.side.dim(k)
    }
}

impl fmt::Display for LambdaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.side.index())
    }
}

/// The eight pairs, in the fixed column order used by every LP and certificate.
pub const LAMBDA: [LambdaPair; 8] = [
    LambdaPair::new(0, OkSide::Trivial),
    LambdaPair::new(1, OkSide::Trivial),
    LambdaPair::new(4, OkSide::Trivial),
    LambdaPair::new(0, OkSide::TracelessSymmetric),
    LambdaPair::new(1, OkSide::TracelessSymmetric),
    LambdaPair::new(4, OkSide::TracelessSymmetric),
    LambdaPair::new(2, OkSide::Skew),
    LambdaPair::new(3, OkSide::Skew),
];

/// Column index of `pair` in [`LAMBDA`].
pub fn lambda_index(pair: LambdaPair) -> usize {
    LAMBDA
        .iter()
        .position(|&p| p == pair)
        .expect("every LambdaPair is constructed from LAMBDA")
}

/// Precomputed bases for evaluating the `s_ij` at `16 × k` points.
pub struct SGenerators<'a> {
    k: usize,
    clifford: &'a CliffordSystem,
    skew: Vec<OkBasisElement>,
    trivial: Vec<OkBasisElement>,
    symmetric: Vec<OkBasisElement>,
}

impl<'a> SGenerators<'a> {
    pub fn new(clifford: &'a CliffordSystem, k: usize) -> Result<Self> {
        Ok(Self {
            k,
            clifford,
            skew: u_basis(OkSide::Skew, k)?,
            trivial: u_basis(OkSide::Trivial, k)?,
            symmetric: u_basis(OkSide::TracelessSymmetric, k)?,
        })
    }

    pub fn standard(k: usize) -> Result<SGenerators<'static>> {
        SGenerators::new(CliffordSystem::standard(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basis(&self, side: OkSide) -> &[OkBasisElement] {
        match side {
            OkSide::Skew => &self.skew,
            OkSide::Trivial => &self.trivial,
            OkSide::TracelessSymmetric => &self.symmetric,
        }
    }

    fn check_point(&self, x: &MatrixPoint) -> Result<()> {
        if x.k() != self.k {
            return Err(Error::Dimension(format!(
                "point has {} columns, generators built for k = {}",
                x.k(),
                self.k
            )));
        }
        Ok(())
    }

    /// `s_ij(X)` for one pair.
    pub fn eval(&self, pair: LambdaPair, x: &MatrixPoint) -> Result<Q> {
        self.check_point(x)?;
        Ok(self.eval_pairs(&[pair], x).remove(0))
    }

    /// All eight values, in [`LAMBDA`] order.
    pub fn eval_all(&self, x: &MatrixPoint) -> Result<[Q; 8]> {
        self.check_point(x)?;
        let v = self.eval_pairs(&LAMBDA, x);
        Ok(std::array::from_fn(|i| v[i].clone()))
    }

    /// `Σ_{Λ} s_ij(X)`, which must equal `‖X‖_F⁴`.
    pub fn sum_check(&self, x: &MatrixPoint) -> Result<Q> {
        Ok(self.eval_all(x)?.into_iter().sum())
    }

    fn eval_pairs(&self, pairs: &[LambdaPair], x: &MatrixPoint) -> Vec<Q> {
        // Work over integers: X = N / d, so every s_ij carries a factor 1/d⁴.
        let (numers, denom) = x.matrix().clear_denominators();
        let m = max_abs(&numers).to_f64().unwrap_or(f64::INFINITY);
        let k = self.k as f64;
        let bound = 256.0 * k * k * (32.0 * k * m * m).powi(2);
        let sums: Vec<BTreeMap<i64, BigInt>> = if bound < 1e36 {
            let n = numers.map(|v| v.to_i128().expect("bounded by max_abs"));
            self.squared_contractions(pairs, &n)
                .into_iter()
                .map(|b| b.into_iter().map(|(norm, s)| (norm, BigInt::from(s))).collect())
                .collect()
        } else {
            self.squared_contractions(pairs, &numers)
        };
        let d4 = num_traits::pow(denom, 4);
        sums.into_iter()
            .map(|buckets| {
                buckets
                    .into_iter()
                    .map(|(norm, s)| Q::new(s, BigInt::from(norm * NORM_SQ) * &d4))
                    .sum()
            })
            .collect()
    }

    /// For each pair, `Σ_a Σ_b ⟨Nᵀ E_a N, F_b⟩²` bucketed by `‖F_b‖²`.
    fn squared_contractions<T>(&self, pairs: &[LambdaPair], n: &Matrix<T>) -> Vec<BTreeMap<i64, T>>
    where
        T: Scalar + num_traits::FromPrimitive,
    {
        let k = self.k;
        let mut outer: Vec<Option<Vec<T>>> = vec![None; DIM * DIM];
        let mut results = Vec::with_capacity(pairs.len());
        let mut m = vec![T::zero(); k * k];
        for pair in pairs {
            let basis = self.basis(pair.side);
            let mut buckets: BTreeMap<i64, T> = BTreeMap::new();
            let level = self
                .clifford
                .v_basis(pair.level)
                .expect("LAMBDA levels are in 0..=4");
            for e in &level.elements {
                xt_e_x(e, n, k, &mut outer, &mut m);
                for f in basis {
                    let c = f.contract(&m);
                    if c.is_zero() {
                        continue;
                    }
                    let slot = buckets.entry(f.norm_sq).or_insert_with(T::zero);
                    *slot = slot.clone() + c.clone() * c;
                }
            }
            results.push(buckets);
        }
        results
    }
}

/// Writes `Nᵀ E N` into `m` (row-major `k × k`), using cached outer products
/// of the rows of `N`.
fn xt_e_x<T: Scalar>(
    e: &CliffordMatrix,
    n: &Matrix<T>,
    k: usize,
    outer: &mut [Option<Vec<T>>],
    m: &mut [T],
) {
    m.iter_mut().for_each(|v| *v = T::zero());
    // (Nᵀ E N)_{pq} = Σ_r N_{rp} sign_r N_{perm(r) q}
    for r in 0..DIM {
        let s = e.perm()[r];
        let prod = outer[r * DIM + s].get_or_insert_with(|| {
            let (a, b) = (n.row(r), n.row(s));
            let mut v = Vec::with_capacity(k * k);
            for ap in a {
                for bq in b {
                    v.push(ap.clone() * bq.clone());
                }
            }
            v
        });
        if e.sign()[r] > 0 {
            for (slot, v) in m.iter_mut().zip(prod.iter()) {
                *slot = slot.clone() + v.clone();
            }
        } else {
            for (slot, v) in m.iter_mut().zip(prod.iter()) {
                *slot = slot.clone() - v.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::certificate::TestPointSet;
    use crate::sampling::{random_rational_matrix, Rng};

    fn gram_is_diagonal(basis: &[OkBasisElement]) -> bool {
        let mats: Vec<Matrix<Q>> = basis.iter().map(|b| b.matrix()).collect();
        mats.iter().enumerate().all(|(a, ma)| {
            mats.iter().enumerate().all(|(b, mb)| {
                let g = ma.frobenius_inner(mb);
                if a == b {
                    g == basis[a].norm_sq()
                } else {
                    g.is_zero()
                }
            })
        })
    }

    #[test]
    fn u_basis_counts_and_shapes() {
        let id = u_basis(OkSide::Trivial, 5).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id[0].matrix::<Q>(), Matrix::identity(5));
        assert_eq!(id[0].norm_sq(), qi(5));

        let skew = u_basis(OkSide::Skew, 3).unwrap();
        assert_eq!(skew.len(), 3);
        assert!(skew.iter().all(|b| b.norm_sq() == qi(2) && b.matrix::<Q>().is_skew()));
        assert!(gram_is_diagonal(&skew));

        let sym = u_basis(OkSide::TracelessSymmetric, 2).unwrap();
        assert_eq!(sym.len(), 2);
        let identity = Matrix::<Q>::identity(2);
        for b in &sym {
            let m: Matrix<Q> = b.matrix();
            assert!(m.is_symmetric());
            assert!(m.frobenius_inner(&identity).is_zero());
        }
        assert!(gram_is_diagonal(&sym));
    }

    #[test]
    fn u_bases_are_orthogonal_and_complete() {
        for k in 2..=6 {
            let mut all = Vec::new();
            for side in [OkSide::Skew, OkSide::Trivial, OkSide::TracelessSymmetric] {
                let b = u_basis(side, k).unwrap();
                assert_eq!(b.len(), side.dim(k));
                all.extend(b);
            }
            assert_eq!(all.len(), k * k);
            assert!(gram_is_diagonal(&all));
        }
        assert!(u_basis(OkSide::Trivial, 1).is_err());
    }

    #[test]
    fn lambda_membership() {
        assert!(LambdaPair::from_indices(4, 1).is_ok());
        assert!(LambdaPair::from_indices(2, 0).is_err());
        assert!(LambdaPair::from_indices(0, 2).is_err());
        assert_eq!(lambda_index(LambdaPair::from_indices(3, -1).unwrap()), 7);
        assert_eq!(LambdaPair::from_indices(4, 1).unwrap().generator_count(17), 126 * 152);
    }

    #[test]
    fn values_at_named_points() {
        let g16 = SGenerators::standard(16).unwrap();
        let p16 = TestPointSet::new(16).unwrap();
        let s00 = LambdaPair::from_indices(0, 0).unwrap();
        assert_eq!(g16.eval(s00, &p16.x3).unwrap(), qi(1));

        let g17 = SGenerators::standard(17).unwrap();
        let p17 = TestPointSet::new(17).unwrap();
        let s41 = LambdaPair::from_indices(4, 1).unwrap();
        assert_eq!(g17.eval(s41, &p17.x2).unwrap(), qi(140));

        assert_eq!(g17.sum_check(&p17.x1).unwrap(), qi(1));
        assert_eq!(g16.sum_check(&p16.x3).unwrap(), qi(256));
    }

    #[test]
    fn level_zero_side_matches_projector_norm() {
        let mut rng = Rng::seeded(21);
        let k = 3;
        let g = SGenerators::standard(k).unwrap();
        let x = MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k)).unwrap();
        let z = x.gram();
        for level in [0, 1, 4] {
            let pair = LambdaPair::new(level, OkSide::Trivial);
            let p = CliffordSystem::standard().project_v(level, &z).unwrap();
            assert_eq!(g.eval(pair, &x).unwrap(), p.frobenius_norm_sq() / qi(k as i64));
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = SGenerators::standard(3).unwrap();
        let x = MatrixPoint::new(Matrix::zeros(DIM, 4)).unwrap();
        assert!(matches!(g.eval_all(&x), Err(Error::Dimension(_))));
    }

    /// Big-integer path agrees with the i128 path.
    #[test]
    fn wide_entries_take_the_bigint_path() {
        let mut rng = Rng::seeded(2);
        let k = 2;
        let g = SGenerators::standard(k).unwrap();
        let small = random_rational_matrix(&mut rng, DIM, k);
        let big = small.scale(&Q::from_integer(BigInt::from(10u64).pow(12)));
        let xs = MatrixPoint::new(small).unwrap();
        let xb = MatrixPoint::new(big).unwrap();
        let scale4 = Q::from_integer(BigInt::from(10u64).pow(48));
        let vs = g.eval_all(&xs).unwrap();
        let vb = g.eval_all(&xb).unwrap();
        for (a, b) in vs.iter().zip(&vb) {
            assert_eq!(a * &scale4, *b);
        }
    }
}
