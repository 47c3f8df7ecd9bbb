//! The Clifford system `S_0, …, S_8` on `R^16`, the products `S_J`, and the
//! decomposition `R^{16×16} = V_0 ⊕ V_1 ⊕ V_2 ⊕ V_3 ⊕ V_4` with
//! `V_l = span{S_J : |J| = l}`.
//!
//! Every `S_J` is a signed permutation matrix, so besides the dense form we
//! keep the compact `(perm, sign)` description and use it for all the hot
//! contractions (`S X`, `⟨S, Z⟩`, `tr(Xᵀ S X)`).

use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar, Q};
use crate::octonion::{MulTable, Octonion};

pub const DIM: usize = 16;
pub const NUM_GENERATORS: usize = 9;
/// `‖S_J‖_F² = 16` for every `J`.
pub const NORM_SQ: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Skew,
    /// Only reachable from a corrupted multiplication table.
    Neither,
}

/// `S_J` for a sorted index set `J ⊆ {0..8}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordMatrix {
    subset: Vec<usize>,
    /// Row `r` has its single nonzero in column `perm[r]` with sign `sign[r]`.
    perm: [usize; DIM],
    sign: [i8; DIM],
    symmetry: Symmetry,
}

impl CliffordMatrix {
    /// Converts a dense `{0, ±1}` matrix, checking the signed permutation shape.
    pub fn from_dense(subset: Vec<usize>, m: &Matrix<i64>) -> Result<Self> {
        if m.shape() != (DIM, DIM) {
            return Err(Error::Dimension(format!("expected 16x16, got {:?}", m.shape())));
        }
        let mut perm = [0; DIM];
        let mut sign = [0; DIM];
        let mut col_seen = [false; DIM];
        for r in 0..DIM {
            let nonzero: Vec<usize> = (0..DIM).filter(|&c| m[(r, c)] != 0).collect();
            let [c] = nonzero[..] else {
                return Err(Error::NotSignedPermutation(format!(
                    "row {r} of S_{subset:?} has {} nonzeros",
                    nonzero.len()
                )));
            };
            let v = m[(r, c)];
            if v.abs() != 1 || col_seen[c] {
                return Err(Error::NotSignedPermutation(format!(
                    "S_{subset:?} entry ({r},{c}) = {v}"
                )));
            }
            col_seen[c] = true;
            perm[r] = c;
            sign[r] = v as i8;
        }
        let symmetry = if m.is_symmetric() {
            Symmetry::Symmetric
        } else if m.is_skew() {
            Symmetry::Skew
        } else {
            Symmetry::Neither
        };
        Ok(Self {
            subset,
            perm,
            sign,
            symmetry,
        })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn perm(&self) -> &[usize; DIM] {
        &self.perm
    }

    pub fn sign(&self) -> &[i8; DIM] {
        &self.sign
    }

    pub fn entries<T: Scalar>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(DIM, DIM);
        for r in 0..DIM {
            m[(r, self.perm[r])] = signed_one(self.sign[r]);
        }
        m
    }

    pub fn dense_i64(&self) -> Matrix<i64> {
        self.entries()
    }

    /// `S X` for a `16 × k` matrix `X`.
    pub fn apply_left<T: Scalar>(&self, x: &Matrix<T>) -> Matrix<T> {
        assert_eq!(x.rows(), DIM, "apply_left expects 16 rows");
        Matrix::from_fn(DIM, x.cols(), |r, c| {
            let v = x[(self.perm[r], c)].clone();
            if self.sign[r] > 0 {
                v
            } else {
                -v
            }
        })
    }

    /// Trace inner product `⟨S, Z⟩ = tr(Sᵀ Z)`.
    pub fn inner<T: Scalar>(&self, z: &Matrix<T>) -> T {
        (0..DIM).fold(T::zero(), |acc, r| {
            let v = z[(r, self.perm[r])].clone();
            if self.sign[r] > 0 {
                acc + v
            } else {
                acc - v
            }
        })
    }

    /// `tr(Xᵀ S X)`.
    pub fn quadratic_trace<T: Scalar>(&self, x: &Matrix<T>) -> T {
        assert_eq!(x.rows(), DIM);
        let mut acc = T::zero();
        for r in 0..DIM {
            let dot = x
                .row(r)
                .iter()
                .zip(x.row(self.perm[r]))
                .fold(T::zero(), |a, (p, q)| a + p.clone() * q.clone());
            if self.sign[r] > 0 {
                acc = acc + dot;
            } else {
                acc = acc - dot;
            }
        }
        acc
    }

    pub fn trace(&self) -> i64 {
        (0..DIM)
            .filter(|&r| self.perm[r] == r)
            .map(|r| i64::from(self.sign[r]))
            .sum()
    }

    /// Exact trace inner product with another signed permutation.
    pub fn inner_with(&self, other: &Self) -> i64 {
        (0..DIM)
            .filter(|&r| self.perm[r] == other.perm[r])
            .map(|r| i64::from(self.sign[r] * other.sign[r]))
            .sum()
    }
}

fn signed_one<T: Scalar>(s: i8) -> T {
    if s > 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Dense integer `S_i` built from the right-multiplication matrices of `table`.
pub fn build_s_dense(table: &MulTable, i: usize) -> Result<Matrix<i64>> {
    if i >= NUM_GENERATORS {
        return Err(Error::IndexOutOfRange {
            index: i,
            expected: "0..=8",
        });
    }
    let mut s = Matrix::zeros(DIM, DIM);
    if i == 8 {
        for r in 0..8 {
            s[(r, r)] = 1;
            s[(r + 8, r + 8)] = -1;
        }
        return Ok(s);
    }
    let unit = Octonion::unit(i);
    let to_int = |m: Matrix<Q>| {
        m.map(|x| {
            debug_assert!(x.is_integer());
            if x.is_zero() {
                0
            } else if x.is_one() {
                1
            } else {
                -1
            }
        })
    };
    let r_u = to_int(table.right_mult_matrix(&unit));
    let r_conj = to_int(table.right_mult_matrix(&unit.conj()));
    s.set_block(0, 8, &r_u);
    s.set_block(8, 0, &r_conj);
    Ok(s)
}

/// `S_i` as a [`CliffordMatrix`].
pub fn build_s(table: &MulTable, i: usize) -> Result<CliffordMatrix> {
    CliffordMatrix::from_dense(vec![i], &build_s_dense(table, i)?)
}

/// `S_J = S_{j_1} ⋯ S_{j_m}` with ascending indices; `S_∅ = I`.
pub fn build_sj(table: &MulTable, subset: &[usize]) -> Result<CliffordMatrix> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() {
        return Err(Error::InvalidArgument(format!(
            "index set {subset:?} has repeated entries"
        )));
    }
    let mut acc = Matrix::<i64>::identity(DIM);
    for &j in &sorted {
        acc = &acc * &build_s_dense(table, j)?;
    }
    CliffordMatrix::from_dense(sorted, &acc)
}

/// Sorted `level`-subsets of `{0..n}` in lexicographic order.
pub fn subsets(n: usize, level: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=(n - left) {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if level <= n {
        rec(0, n, level, &mut Vec::new(), &mut out);
    }
    out
}

/// Basis `{S_J : |J| = level}` of `V_level`.
#[derive(Clone, Debug)]
pub struct VSubspaceBasis {
    pub level: usize,
    pub elements: Vec<CliffordMatrix>,
}

impl VSubspaceBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The nine generators together with the bases of `V_0, …, V_4`.
#[derive(Clone, Debug)]
pub struct CliffordSystem {
    generators: Vec<CliffordMatrix>,
    levels: Vec<VSubspaceBasis>,
}

impl CliffordSystem {
    pub fn new(table: &MulTable) -> Result<Self> {
        let generators = (0..NUM_GENERATORS)
            .map(|i| build_s(table, i))
            .collect::<Result<Vec<_>>>()?;
        let levels = (0..=4)
            .map(|level| {
                let elements = subsets(NUM_GENERATORS, level)
                    .iter()
                    .map(|j| build_sj(table, j))
                    .collect::<Result<Vec<_>>>()?;
                Ok(VSubspaceBasis { level, elements })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { generators, levels })
    }

    /// The system built from the standard multiplication table, built once.
    pub fn standard() -> &'static Self {
        static SYSTEM: OnceLock<CliffordSystem> = OnceLock::new();
        SYSTEM.get_or_init(|| {
            Self::new(&MulTable::standard()).expect("standard table yields signed permutations")
        })
    }

    pub fn generator(&self, i: usize) -> Result<&CliffordMatrix> {
        self.generators.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            expected: "0..=8",
        })
    }

    pub fn generators(&self) -> &[CliffordMatrix] {
        &self.generators
    }

    pub fn v_basis(&self, level: usize) -> Result<&VSubspaceBasis> {
        self.levels.get(level).ok_or(Error::IndexOutOfRange {
            index: level,
            expected: "0..=4",
        })
    }

    /// All 256 basis matrices, levels 0 through 4 in order.
    pub fn all_basis(&self) -> impl Iterator<Item = &CliffordMatrix> {
        self.levels.iter().flat_map(|l| l.elements.iter())
    }

    /// Orthogonal projection of `Z` onto `V_level` under the trace inner
    /// product: `Σ_J ⟨S_J, Z⟩ / 16 · S_J`.
    pub fn project_v<T: Scalar + num_traits::FromPrimitive>(
        &self,
        level: usize,
        z: &Matrix<T>,
    ) -> Result<Matrix<T>> {
        if z.shape() != (DIM, DIM) {
            return Err(Error::Dimension(format!(
                "project_v expects 16x16, got {:?}",
                z.shape()
            )));
        }
        let norm = T::from_i64(NORM_SQ).expect("16 is representable");
        let mut out: Matrix<T> = Matrix::zeros(DIM, DIM);
        for e in &self.v_basis(level)?.elements {
            let coeff = e.inner(z) / norm.clone();
            if coeff.is_zero() {
                continue;
            }
            for r in 0..DIM {
                let c = e.perm[r];
                let term = coeff.clone();
                out[(r, c)] = if e.sign[r] > 0 {
                    out[(r, c)].clone() + term
                } else {
                    out[(r, c)].clone() - term
                };
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qi;
    use crate::sampling::{random_rational_matrix, Rng};

    fn sys() -> &'static CliffordSystem {
        CliffordSystem::standard()
    }

    #[test]
    fn s8_and_s0_blocks() {
        let s8 = sys().generator(8).unwrap().dense_i64();
        for r in 0..DIM {
            for c in 0..DIM {
                let expected = match (r == c, r < 8) {
                    (true, true) => 1,
                    (true, false) => -1,
                    _ => 0,
                };
                assert_eq!(s8[(r, c)], expected);
            }
        }
        let s0 = sys().generator(0).unwrap().dense_i64();
        for r in 0..DIM {
            for c in 0..DIM {
                let expected = i64::from((r + 8 == c) || (c + 8 == r));
                assert_eq!(s0[(r, c)], expected, "({r},{c})");
            }
        }
    }

    #[test]
    fn generator_index_out_of_range() {
        assert!(matches!(
            build_s(&MulTable::standard(), 9),
            Err(Error::IndexOutOfRange { index: 9, .. })
        ));
        assert!(sys().generator(9).is_err());
        assert!(sys().v_basis(5).is_err());
    }

    #[test]
    fn clifford_relations_all_pairs() {
        let dense: Vec<Matrix<i64>> = sys().generators().iter().map(|s| s.dense_i64()).collect();
        for i in 0..9 {
            assert!(dense[i].is_symmetric());
            for j in 0..9 {
                let anti = &(&dense[i] * &dense[j]) + &(&dense[j] * &dense[i]);
                let expected = if i == j {
                    Matrix::identity(DIM).scale(&2)
                } else {
                    Matrix::zeros(DIM, DIM)
                };
                assert_eq!(anti, expected, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn full_product_is_scalar() {
        // Nine anticommuting involutions: the product is central with square
        // +I, so it is ±I. The displayed table lands on +I.
        let all: Vec<usize> = (0..9).collect();
        let p = build_sj(&MulTable::standard(), &all).unwrap().dense_i64();
        assert_eq!(p.matmul(&p), Matrix::identity(DIM));
        assert_eq!(p, Matrix::identity(DIM));
        assert_eq!(build_sj(&MulTable::standard(), &[]).unwrap().dense_i64(), Matrix::identity(DIM));
    }

    #[test]
    fn transpose_sign_rule() {
        for level in 0usize..=4 {
            let expected_sign = if (level * (level.saturating_sub(1)) / 2) % 2 == 0 { 1 } else { -1 };
            for e in &sys().v_basis(level).unwrap().elements {
                let m = e.dense_i64();
                assert_eq!(m.transpose(), m.scale(&expected_sign), "{:?}", e.subset());
                let expected_class = if matches!(level, 2 | 3) {
                    Symmetry::Skew
                } else {
                    Symmetry::Symmetric
                };
                assert_eq!(e.symmetry(), expected_class);
            }
        }
        let s12 = build_sj(&MulTable::standard(), &[1, 2]).unwrap().dense_i64();
        assert_eq!(s12.transpose(), -&s12);
    }

    #[test]
    fn basis_counts_traces_and_gram() {
        let counts: Vec<usize> = (0..=4).map(|l| sys().v_basis(l).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 9, 36, 84, 126]);
        let all: Vec<&CliffordMatrix> = sys().all_basis().collect();
        assert_eq!(all.len(), 256);
        for (a, ea) in all.iter().enumerate() {
            if !ea.subset().is_empty() {
                assert_eq!(ea.trace(), 0);
            }
            for (b, eb) in all.iter().enumerate() {
                let expected = if a == b { NORM_SQ } else { 0 };
                assert_eq!(ea.inner_with(eb), expected);
            }
        }
    }

    #[test]
    fn signed_permutation_contractions_match_dense() {
        let mut rng = Rng::seeded(3);
        let x = random_rational_matrix(&mut rng, DIM, 3);
        let z = random_rational_matrix(&mut rng, DIM, DIM);
        for e in sys().v_basis(2).unwrap().elements.iter().take(5) {
            let d: Matrix<Q> = e.entries();
            assert_eq!(e.apply_left(&x), &d * &x);
            assert_eq!(e.inner(&z), d.frobenius_inner(&z));
            assert_eq!(e.quadratic_trace(&x), (&(&x.transpose() * &d) * &x).trace());
        }
    }

    #[test]
    fn projectors() {
        let mut rng = Rng::seeded(5);
        let z = random_rational_matrix(&mut rng, DIM, DIM);
        let p0 = sys().project_v(0, &z).unwrap();
        assert_eq!(p0, Matrix::identity(DIM).scale(&(z.trace() / qi(16))));
        let s3: Matrix<Q> = sys().generator(3).unwrap().entries();
        assert_eq!(sys().project_v(1, &s3).unwrap(), s3);

        let mut total = Matrix::zeros(DIM, DIM);
        let mut parseval = qi(0);
        for level in 0..=4 {
            let p = sys().project_v(level, &z).unwrap();
            assert_eq!(sys().project_v(level, &p).unwrap(), p, "idempotent at {level}");
            // self-adjoint: ⟨P z, w⟩ = ⟨z, P w⟩
            let w = random_rational_matrix(&mut rng, DIM, DIM);
            let pw = sys().project_v(level, &w).unwrap();
            assert_eq!(p.frobenius_inner(&w), z.frobenius_inner(&pw));
            parseval += p.frobenius_norm_sq();
            total = &total + &p;
        }
        assert_eq!(total, z);
        assert_eq!(parseval, z.frobenius_norm_sq());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(9, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(9, 2).len(), 36);
        assert_eq!(subsets(9, 4)[0], vec![0, 1, 2, 3]);
        assert_eq!(subsets(3, 4).len(), 0);
    }

    #[test]
    fn repeated_indices_rejected() {
        assert!(build_sj(&MulTable::standard(), &[1, 1]).is_err());
    }
}
