//! The octonionic Cauchy–Schwarz quartic `cs_k` and its convexified shift
//! `q_k = cs_k + ¼(‖x‖² + ‖y‖²)²`, as functions of `X ∈ R^{16×k}` whose
//! column `j` stacks `[x_j]` over `[y_j]`.
//!
//! `q_k` is evaluated three ways: from the octonionic definition, as
//! `½ tr(XXᵀ)² − ¼ Σ_i tr(Xᵀ S_i X)²`, and as `½ tr(XXᵀ)² − 4 ‖P_{V_1}(XXᵀ)‖²`.
//! The second form is generic over the scalar, so the same code drives both
//! exact checks and the floating convexity samples.

use num_traits::FromPrimitive;

use crate::clifford::{CliffordSystem, DIM};
use crate::error::{Error, Result};
use crate::linalg::{qi, Matrix, Scalar, Q};
use crate::octonion::{Octonion, OctonionVector};

/// A point `X ∈ Q^{16×k}`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoint {
    x: Matrix<Q>,
}

impl MatrixPoint {
    pub fn new(x: Matrix<Q>) -> Result<Self> {
        if x.rows() != DIM || x.cols() == 0 {
            return Err(Error::Dimension(format!(
                "a point must be 16 x k with k >= 1, got {:?}",
                x.shape()
            )));
        }
        Ok(Self { x })
    }

    pub fn zeros(k: usize) -> Self {
        Self {
            x: Matrix::zeros(DIM, k),
        }
    }

    /// Packs `(x, y) ∈ O^k × O^k` column by column.
    pub fn from_xy(x: &OctonionVector, y: &OctonionVector) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!(
                "x has {} entries, y has {}",
                x.len(),
                y.len()
            )));
        }
        let m = Matrix::from_fn(DIM, x.len(), |r, c| {
            if r < 8 {
                x.entries()[c].coords[r].clone()
            } else {
                y.entries()[c].coords[r - 8].clone()
            }
        });
        Self::new(m)
    }

    pub fn k(&self) -> usize {
        self.x.cols()
    }

    pub fn matrix(&self) -> &Matrix<Q> {
        &self.x
    }

    pub fn into_matrix(self) -> Matrix<Q> {
        self.x
    }

    /// `(x, y)` read back off the columns.
    pub fn xy(&self) -> (OctonionVector, OctonionVector) {
        let column = |c: usize, offset: usize| {
            Octonion::new(std::array::from_fn(|r| self.x[(r + offset, c)].clone()))
        };
        let xs = (0..self.k()).map(|c| column(c, 0)).collect();
        let ys = (0..self.k()).map(|c| column(c, 8)).collect();
        (OctonionVector::new(xs), OctonionVector::new(ys))
    }

    /// `XXᵀ`.
    pub fn gram(&self) -> Matrix<Q> {
        &self.x * &self.x.transpose()
    }

    /// `‖X‖_F² = tr(XXᵀ) = ‖x‖² + ‖y‖²`.
    pub fn norm_sq(&self) -> Q {
        self.x.frobenius_norm_sq()
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self { x: self.x.scale(s) }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.x.to_f64()
    }
}

/// `cs_k(x, y) = ‖x‖²‖y‖² − |(x, y)|²` straight from octonion arithmetic.
pub fn cs_eval_octonion(x: &MatrixPoint) -> Q {
    let (xs, ys) = x.xy();
    xs.norm_sq() * ys.norm_sq() - xs.pairing(&ys).norm_sq()
}

/// `q_k = cs_k + ¼ tr(XXᵀ)²` from the octonionic definition.
pub fn q_eval(x: &MatrixPoint) -> Q {
    let t = x.norm_sq();
    cs_eval_octonion(x) + &t * &t / qi(4)
}

/// `½ tr(XXᵀ)² − ¼ Σ_i tr(Xᵀ S_i X)²` over any scalar.
pub fn q_matrix_form<T: Scalar + FromPrimitive>(x: &Matrix<T>) -> T {
    let sys = CliffordSystem::standard();
    let t = x.frobenius_norm_sq();
    let sum_sq = sys.generators().iter().fold(T::zero(), |acc, s| {
        let c = s.quadratic_trace(x);
        acc + c.clone() * c
    });
    let two = T::from_i64(2).expect("small constant");
    let four = T::from_i64(4).expect("small constant");
    t.clone() * t / two - sum_sq / four
}

/// The three evaluations of `q_k` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct QEvaluations {
    pub octonion: Q,
    pub clifford_sum: Q,
    pub projector: Q,
}

/// Evaluates `q_k` by all three routes and fails unless they agree exactly.
pub fn q_eval_matrix(x: &MatrixPoint) -> Result<QEvaluations> {
    let t = x.norm_sq();
    let half_t2 = &t * &t / qi(2);
    let p1 = CliffordSystem::standard().project_v(1, &x.gram())?;
    let evals = QEvaluations {
        octonion: q_eval(x),
        clifford_sum: q_matrix_form(x.matrix()),
        projector: half_t2 - qi(4) * p1.frobenius_norm_sq(),
    };
    if evals.octonion != evals.clifford_sum || evals.clifford_sum != evals.projector {
        return Err(Error::IdentityMismatch(format!(
            "q_k evaluations disagree: octonion {}, S_i sum {}, projector {}",
            evals.octonion, evals.clifford_sum, evals.projector
        )));
    }
    Ok(evals)
}

/// `∇q(X) = 2 tr(XXᵀ) X − Σ_i tr(Xᵀ S_i X) S_i X`.
pub fn gradient<T: Scalar + FromPrimitive>(x: &Matrix<T>) -> Matrix<T> {
    let sys = CliffordSystem::standard();
    let two = T::from_i64(2).expect("small constant");
    let mut g = x.scale(&(two * x.frobenius_norm_sq()));
    for s in sys.generators() {
        let c = s.quadratic_trace(x);
        g = &g - &s.apply_left(x).scale(&c);
    }
    g
}

/// Directional derivative of the gradient along `Y`:
/// `2t Y + 4⟨X,Y⟩ X − Σ_i [c_i S_i Y + 2 ⟨S_i X, Y⟩ S_i X]`.
pub fn hessian_apply<T: Scalar + FromPrimitive>(x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
    assert_eq!(x.shape(), y.shape(), "hessian_apply shape mismatch");
    let sys = CliffordSystem::standard();
    let two = T::from_i64(2).expect("small constant");
    let four = T::from_i64(4).expect("small constant");
    let t = x.frobenius_norm_sq();
    let mut h = &y.scale(&(two.clone() * t)) + &x.scale(&(four * x.frobenius_inner(y)));
    for s in sys.generators() {
        let c = s.quadratic_trace(x);
        let sx = s.apply_left(x);
        let d = two.clone() * sx.frobenius_inner(y);
        h = &h - &s.apply_left(y).scale(&c);
        h = &h - &sx.scale(&d);
    }
    h
}

/// Column-major flattening index of entry `(r, c)` of a `16 × k` matrix.
pub fn flat_index(r: usize, c: usize) -> usize {
    c * DIM + r
}

fn vec_col_major<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            v.push(m[(r, c)].clone());
        }
    }
    v
}

/// The `16k × 16k` Hessian in the column-major flattening [`flat_index`]:
/// `2t I + 4 vec(X)vec(X)ᵀ − Σ_i [c_i (I_k ⊗ S_i) + 2 vec(S_i X) vec(S_i X)ᵀ]`.
pub fn hessian_matrix<T: Scalar + FromPrimitive>(x: &Matrix<T>) -> Matrix<T> {
    let sys = CliffordSystem::standard();
    let n = x.rows() * x.cols();
    let k = x.cols();
    let two = T::from_i64(2).expect("small constant");
    let four = T::from_i64(4).expect("small constant");
    let t = x.frobenius_norm_sq();
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = two.clone() * t.clone();
    }
    let add_rank_one = |h: &mut Matrix<T>, v: &[T], w: &T| {
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            let s = w.clone() * va.clone();
            for (b, vb) in v.iter().enumerate() {
                h[(a, b)] = h[(a, b)].clone() + s.clone() * vb.clone();
            }
        }
    };
    add_rank_one(&mut h, &vec_col_major(x), &four);
    for s in sys.generators() {
        let c = s.quadratic_trace(x);
        if !c.is_zero() {
            for col in 0..k {
                for r in 0..DIM {
                    let (row, colm) = (flat_index(r, col), flat_index(s.perm()[r], col));
                    let v = if s.sign()[r] > 0 { c.clone() } else { -c.clone() };
                    h[(row, colm)] = h[(row, colm)].clone() - v;
                }
            }
        }
        add_rank_one(&mut h, &vec_col_major(&s.apply_left(x)), &(-two.clone()));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::TestPointSet;
    use crate::linalg::q;
    use crate::sampling::{random_rational_matrix, Rng};

    fn random_point(rng: &mut Rng, k: usize) -> MatrixPoint {
        MatrixPoint::new(random_rational_matrix(rng, DIM, k)).unwrap()
    }

    #[test]
    fn named_points() {
        let p = TestPointSet::new(16).unwrap();
        assert_eq!(q_eval(&p.x1), q(1, 4));
        assert_eq!(q_eval(&p.x2), qi(64));
        assert_eq!(q_eval(&p.x3), qi(128));
        assert_eq!(cs_eval_octonion(&p.x2), qi(0));
        assert_eq!(cs_eval_octonion(&p.x3), qi(64));
        assert_eq!(q_eval_matrix(&p.x1).unwrap().projector, q(1, 4));
    }

    #[test]
    fn y_zero_gives_zero_cs() {
        let mut rng = Rng::seeded(1);
        let mut m = random_rational_matrix(&mut rng, DIM, 4);
        for r in 8..DIM {
            for c in 0..4 {
                m[(r, c)] = qi(0);
            }
        }
        let x = MatrixPoint::new(m).unwrap();
        assert_eq!(cs_eval_octonion(&x), qi(0));
    }

    #[test]
    fn single_column_is_quarter_norm_to_fourth() {
        let mut rng = Rng::seeded(2);
        let mut m = random_rational_matrix(&mut rng, DIM, 1);
        for r in 8..DIM {
            m[(r, 0)] = qi(0);
        }
        let x = MatrixPoint::new(m).unwrap();
        let n = x.norm_sq();
        assert_eq!(q_eval_matrix(&x).unwrap().octonion, &n * &n / qi(4));
    }

    #[test]
    fn three_routes_agree() {
        let mut rng = Rng::seeded(3);
        for k in [1, 2, 3, 5] {
            for _ in 0..10 {
                q_eval_matrix(&random_point(&mut rng, k)).unwrap();
            }
        }
    }

    #[test]
    fn xy_round_trip() {
        let mut rng = Rng::seeded(4);
        let x = random_point(&mut rng, 3);
        let (xs, ys) = x.xy();
        assert_eq!(MatrixPoint::from_xy(&xs, &ys).unwrap(), x);
        assert_eq!(xs.norm_sq() + ys.norm_sq(), x.norm_sq());
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(MatrixPoint::new(Matrix::zeros(15, 2)).is_err());
        assert!(MatrixPoint::new(Matrix::zeros(16, 0)).is_err());
    }

    #[test]
    fn gradient_identities() {
        let mut rng = Rng::seeded(5);
        assert!(gradient(MatrixPoint::zeros(3).matrix()).is_zero());
        for _ in 0..5 {
            let x = random_point(&mut rng, 3);
            let g = gradient(x.matrix());
            // Euler: ⟨∇q, X⟩ = 4 q
            assert_eq!(g.frobenius_inner(x.matrix()), qi(4) * q_eval(&x));
            let t = q(3, 2);
            let gt = gradient(x.scale(&t).matrix());
            assert_eq!(gt, g.scale(&(&t * &t * &t)));
        }
    }

    #[test]
    fn hessian_apply_matches_matrix_and_is_symmetric() {
        let mut rng = Rng::seeded(6);
        let k = 2;
        let x = random_point(&mut rng, k);
        let h = hessian_matrix(x.matrix());
        assert!(h.is_symmetric());
        let y = random_rational_matrix(&mut rng, DIM, k);
        let w = random_rational_matrix(&mut rng, DIM, k);
        let hy = hessian_apply(x.matrix(), &y);
        assert_eq!(h.apply(&vec_col_major(&y)), vec_col_major(&hy));
        // self-adjoint as a bilinear form
        assert_eq!(hy.frobenius_inner(&w), hessian_apply(x.matrix(), &w).frobenius_inner(&y));
        // second-order Euler: H(X)[X] = 3 ∇q(X)
        assert_eq!(hessian_apply(x.matrix(), x.matrix()), gradient(x.matrix()).scale(&qi(3)));
        // degree-2 homogeneity
        let t = q(-2, 3);
        assert_eq!(hessian_matrix(x.scale(&t).matrix()), h.scale(&(&t * &t)));
    }

    #[test]
    fn finite_difference_gradient() {
        let mut rng = Rng::seeded(7);
        let x = random_point(&mut rng, 3).to_f64();
        let y = random_point(&mut rng, 3).to_f64();
        let h = 1e-5;
        let fd = (q_matrix_form(&(&x + &y.scale(&h))) - q_matrix_form(&(&x - &y.scale(&h)))) / (2.0 * h);
        let an = gradient(&x).frobenius_inner(&y);
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "fd {fd} vs analytic {an}");
    }
}
