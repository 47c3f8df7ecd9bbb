//! The symmetry-reduced LP deciding whether `q_k` (or a shift of `cs_k`) is a
//! sum of squares.
//!
//! An invariant quartic `f` is SOS iff `f = Σ_Λ λ_ij s_ij` with `λ ≥ 0`. The
//! invariant quartics form a 3-dimensional space, so the identity only has to
//! hold at three points whose `3 × 8` matrix of `s_ij` values has rank three.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::clifford::DIM;
use crate::decomposition::{SGenerators, LAMBDA};
use crate::error::{Error, Result};
use crate::forms::{cs_eval_octonion, q_eval, MatrixPoint};
use crate::linalg::{fmt_rational, parse_rational, q, qi, rank, Matrix, Q};
use crate::sampling::{random_rational_matrix, Rng};
use crate::simplex::{self, dot, row_times, Feasibility, LpOutcome};

/// Seed for the extra rank-completing points used when `k < 16`.
const RANK_SEED: u64 = 0x5eed;

/// The three named test points. For `k ≥ 16` these are exactly
/// `X_1 = E_11`, `X_2 = [I_8 0; I_8 0]`, `X_3 = [I_16 0]`; for smaller `k`
/// the identity blocks are truncated to the available columns.
#[derive(Clone, Debug)]
pub struct TestPointSet {
    pub x1: MatrixPoint,
    pub x2: MatrixPoint,
    pub x3: MatrixPoint,
}

impl TestPointSet {
    /// The untruncated points; needs `k ≥ 16`.
    pub fn new(k: usize) -> Result<Self> {
        if k < 16 {
            return Err(Error::InvalidArgument(format!(
                "the named test points need k >= 16, got {k}"
            )));
        }
        Ok(Self::truncated(k))
    }

    pub fn truncated(k: usize) -> Self {
        assert!(k >= 1);
        let x1 = Matrix::from_fn(DIM, k, |r, c| if r == 0 && c == 0 { qi(1) } else { qi(0) });
        let x2 = Matrix::from_fn(DIM, k, |r, c| {
            if c < 8.min(k) && (r == c || r == c + 8) {
                qi(1)
            } else {
                qi(0)
            }
        });
        let x3 = Matrix::from_fn(DIM, k, |r, c| if r == c { qi(1) } else { qi(0) });
        let point = |m| MatrixPoint::new(m).expect("16-row test point");
        Self {
            x1: point(x1),
            x2: point(x2),
            x3: point(x3),
        }
    }

    pub fn points(&self) -> [&MatrixPoint; 3] {
        [&self.x1, &self.x2, &self.x3]
    }
}

/// Which invariant quartic sits on the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// `q_k = cs_k + ¼‖X‖⁴`.
    Q,
    /// `cs_k`.
    Cs,
}

impl FormKind {
    pub fn eval(self, x: &MatrixPoint) -> Q {
        match self {
            Self::Q => q_eval(x),
            Self::Cs => cs_eval_octonion(x),
        }
    }
}

/// `A λ = b, λ ≥ 0` with `A_ℓ,(ij) = s_ij(X_ℓ)` and `b_ℓ = f(X_ℓ)`.
#[derive(Clone, Debug)]
pub struct ConeProblem {
    pub k: usize,
    pub form: FormKind,
    pub a: Matrix<Q>,
    pub b: Vec<Q>,
    pub points: Vec<MatrixPoint>,
}

impl ConeProblem {
    fn from_points(k: usize, form: FormKind, points: Vec<MatrixPoint>) -> Result<Self> {
        let gens = SGenerators::standard(k)?;
        let rows = points
            .iter()
            .map(|x| gens.eval_all(x).map(|v| v.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let b = points.iter().map(|x| form.eval(x)).collect();
        Ok(Self {
            k,
            form,
            a: Matrix::from_rows(rows)?,
            b,
            points,
        })
    }

    pub fn rank(&self) -> usize {
        rank(&self.a)
    }

    /// `‖X_ℓ‖⁴` at each point, the coefficients of the `‖X‖⁴` column.
    pub fn norm4_column(&self) -> Vec<Q> {
        self.points
            .iter()
            .map(|x| {
                let n = x.norm_sq();
                &n * &n
            })
            .collect()
    }
}

/// The `3 × 8` system at the named points `X_1, X_2, X_3`; needs `k ≥ 16`.
pub fn coeff_matrix(k: usize, form: FormKind) -> Result<ConeProblem> {
    let pts = TestPointSet::new(k)?;
    ConeProblem::from_points(k, form, pts.points().map(Clone::clone).to_vec())
}

/// A rank-3 system for any `k ≥ 2`: truncated named points, topped up with
/// seeded random points until three independent rows are found.
pub fn coeff_matrix_any(k: usize, form: FormKind) -> Result<ConeProblem> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 2, got {k}")));
    }
    if k >= 16 {
        return coeff_matrix(k, form);
    }
    let gens = SGenerators::standard(k)?;
    let named = TestPointSet::truncated(k);
    let mut rng = Rng::seeded(RANK_SEED ^ k as u64);
    let mut candidates = named.points().map(Clone::clone).to_vec().into_iter();
    let mut chosen: Vec<MatrixPoint> = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for _ in 0..64 {
        if chosen.len() == 3 {
            break;
        }
        let x = candidates
            .next()
            .unwrap_or_else(|| MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k)).unwrap());
        let row = gens.eval_all(&x)?.to_vec();
        let mut trial = rows.clone();
        trial.push(row.clone());
        if rank(&Matrix::from_rows(trial)?) > rows.len() {
            rows.push(row);
            chosen.push(x);
        }
    }
    if chosen.len() < 3 {
        return Err(Error::RankDeficient {
            found: chosen.len(),
            expected: 3,
        });
    }
    ConeProblem::from_points(k, form, chosen)
}

/// `yᵀA ≥ 0` with `yᵀb < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate {
    pub row: Vec<Q>,
    pub product_row: Vec<Q>,
    pub product_rhs: Q,
}

/// The row that certifies infeasibility of the `k = 17` system.
pub fn known_farkas_row() -> Vec<Q> {
    vec![qi(252), qi(3), qi(-2)]
}

/// `λ` giving `q_16 = (64/15) s_{1,1} + (16/15) s_{3,-1}`.
pub fn known_k16_lambda() -> Vec<Q> {
    let mut l = vec![qi(0); 8];
    l[4] = q(64, 15);
    l[7] = q(16, 15);
    l
}

/// Checks `row` as a Farkas certificate for `problem`.
pub fn farkas_verify(problem: &ConeProblem, row: &[Q]) -> Result<FarkasCertificate> {
    if row.len() != problem.a.rows() {
        return Err(Error::Dimension(format!(
            "Farkas row has {} entries, system has {} rows",
            row.len(),
            problem.a.rows()
        )));
    }
    let product_row = row_times(row, &problem.a);
    let product_rhs = dot(row, &problem.b);
    if let Some((j, v)) = product_row.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::CertificateInvalid(format!(
            "product entry {} for {} is negative ({})",
            j, LAMBDA[j], v
        )));
    }
    if !product_rhs.is_negative() {
        return Err(Error::CertificateInvalid(format!(
            "right-hand side product {product_rhs} is not negative"
        )));
    }
    Ok(FarkasCertificate {
        row: row.to_vec(),
        product_row,
        product_rhs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibilityOutcome {
    Feasible(Vec<Q>),
    Infeasible(FarkasCertificate),
}

/// Decides `∃ λ ≥ 0 : A λ = b` exactly; the returned branch is verified.
pub fn feasibility_solve(problem: &ConeProblem) -> Result<FeasibilityOutcome> {
    let r = problem.rank();
    if r != problem.a.rows() {
        return Err(Error::RankDeficient {
            found: r,
            expected: problem.a.rows(),
        });
    }
    match simplex::feasibility(&problem.a, &problem.b) {
        Feasibility::Feasible(lambda) => {
            if lambda.iter().any(Signed::is_negative) || problem.a.apply(&lambda) != problem.b {
                return Err(Error::IdentityMismatch("simplex returned an invalid λ".into()));
            }
            Ok(FeasibilityOutcome::Feasible(lambda))
        }
        Feasibility::Infeasible(y) => {
            // Scale so the right-hand side reads −1.
            let rhs = dot(&y, &problem.b);
            let scale = -Q::one() / rhs;
            let y: Vec<Q> = y.iter().map(|v| v * &scale).collect();
            Ok(FeasibilityOutcome::Infeasible(farkas_verify(problem, &y)?))
        }
    }
}

/// `A λ = b` at the named points and, beyond them, `q_k(X) = Σ λ_ij s_ij(X)`
/// at `num_points` random rational points.
pub fn verify_decomposition(k: usize, lambda: &[Q], num_points: usize, seed: u64) -> Result<bool> {
    if lambda.len() != 8 {
        return Err(Error::Dimension(format!("λ needs 8 entries, got {}", lambda.len())));
    }
    if lambda.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument("λ must be nonnegative".into()));
    }
    let problem = coeff_matrix(k, FormKind::Q)?;
    if problem.a.apply(lambda) != problem.b {
        return Ok(false);
    }
    let gens = SGenerators::standard(k)?;
    let mut rng = Rng::seeded(seed);
    for _ in 0..num_points {
        let x = MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k))?;
        let s = gens.eval_all(&x)?;
        if dot(lambda, &s) != q_eval(&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `γ` with `cs_k − γ‖X‖⁴` in the cone spanned by the `s_ij`.
pub fn sos_min_invariant(k: usize) -> Result<Q> {
    let problem = coeff_matrix_any(k, FormKind::Cs)?;
    sos_min_of(&problem)
}

/// Solves `max γ : b − γ n = A λ, λ ≥ 0` with `γ = γ⁺ − γ⁻`, where `n` is the
/// `‖X_ℓ‖⁴` column.
pub fn sos_min_of(problem: &ConeProblem) -> Result<Q> {
    let n4 = problem.norm4_column();
    let rows = problem.a.rows();
    let lp = Matrix::from_fn(rows, 10, |r, c| match c {
        0 => n4[r].clone(),
        1 => -n4[r].clone(),
        _ => problem.a[(r, c - 2)].clone(),
    });
    let mut cost = vec![Q::zero(); 10];
    cost[0] = Q::one();
    cost[1] = -Q::one();
    match simplex::solve(&lp, &problem.b, &cost) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Unbounded => Err(Error::Unbounded),
        LpOutcome::Infeasible { .. } => Err(Error::IdentityMismatch(
            "‖X‖⁴ lies in the cone, so the shifted problem cannot be infeasible".into(),
        )),
    }
}

/// `(¼ − γ) / ¼` with `p_max = ¼`, `p_min = 0` for `cs_k` on the unit sphere.
pub fn gap_invariant(k: usize) -> Result<Q> {
    let quarter = q(1, 4);
    Ok((&quarter - sos_min_invariant(k)?) / quarter)
}

/// `−2(k−1)/(8+7k)`.
pub fn sos_min_closed_form(k: usize) -> Q {
    let k = k as i64;
    q(-2 * (k - 1), 8 + 7 * k)
}

/// `15k/(8+7k)`.
pub fn gap_closed_form(k: usize) -> Q {
    let k = k as i64;
    q(15 * k, 8 + 7 * k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sos,
    NotSos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CertificateBody {
    Decomposition {
        lambda: Vec<String>,
    },
    Farkas {
        farkas_row: Vec<String>,
        product_row: Vec<String>,
        product_rhs: String,
    },
}

/// Serialized certificate; rationals are `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: usize,
    pub lambda_order: Vec<(usize, i8)>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    pub b: Vec<String>,
    pub verdict: Verdict,
    pub certificate: CertificateBody,
}

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn parse_all(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

/// Decides whether `q_k` is SOS for `k ≥ 16` and packages a verified
/// certificate. The known λ (for `k = 16`) and known Farkas row are preferred
/// when they verify; otherwise the solver's answer is emitted.
pub fn certify(k: usize) -> Result<Certificate> {
    let problem = coeff_matrix(k, FormKind::Q)?;
    let (verdict, certificate) = match feasibility_solve(&problem)? {
        FeasibilityOutcome::Feasible(solver_lambda) => {
            let known = known_k16_lambda();
            let lambda = if problem.a.apply(&known) == problem.b {
                known
            } else {
                solver_lambda
            };
            (
                Verdict::Sos,
                CertificateBody::Decomposition {
                    lambda: strings(&lambda),
                },
            )
        }
        FeasibilityOutcome::Infeasible(solver_cert) => {
            let cert = farkas_verify(&problem, &known_farkas_row()).unwrap_or(solver_cert);
            (
                Verdict::NotSos,
                CertificateBody::Farkas {
                    farkas_row: strings(&cert.row),
                    product_row: strings(&cert.product_row),
                    product_rhs: fmt_rational(&cert.product_rhs),
                },
            )
        }
    };
    Ok(Certificate {
        k,
        lambda_order: LAMBDA.iter().map(|p| p.indices()).collect(),
        a: (0..problem.a.rows()).map(|r| strings(problem.a.row(r))).collect(),
        b: strings(&problem.b),
        verdict,
        certificate,
    })
}

impl Certificate {
    /// Re-checks a (possibly deserialized) certificate from its own data.
    pub fn check(&self) -> Result<()> {
        let a = Matrix::from_rows(self.a.iter().map(|r| parse_all(r)).collect::<Result<_>>()?)?;
        let b = parse_all(&self.b)?;
        if a.cols() != 8 || a.rows() != b.len() {
            return Err(Error::Dimension("certificate system must be m x 8 with m rhs".into()));
        }
        match (&self.verdict, &self.certificate) {
            (Verdict::Sos, CertificateBody::Decomposition { lambda }) => {
                let lambda = parse_all(lambda)?;
                if lambda.len() != 8 || lambda.iter().any(Signed::is_negative) {
                    return Err(Error::CertificateInvalid("λ must be 8 nonnegative entries".into()));
                }
                if a.apply(&lambda) != b {
                    return Err(Error::CertificateInvalid("A λ != b".into()));
                }
                Ok(())
            }
            (
                Verdict::NotSos,
                CertificateBody::Farkas {
                    farkas_row,
                    product_row,
                    product_rhs,
                },
            ) => {
                let row = parse_all(farkas_row)?;
                let problem = ConeProblem {
                    k: self.k,
                    form: FormKind::Q,
                    a,
                    b,
                    points: Vec::new(),
                };
                let cert = farkas_verify(&problem, &row)?;
                if cert.product_row != parse_all(product_row)?
                    || cert.product_rhs != parse_rational(product_rhs)?
                {
                    return Err(Error::CertificateInvalid("stored products do not match".into()));
                }
                Ok(())
            }
            _ => Err(Error::CertificateInvalid("verdict does not match certificate kind".into())),
        }
    }
}

impl FarkasCertificate {
    pub fn is_zero_row(&self) -> bool {
        self.row.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_points_need_sixteen_columns() {
        assert!(TestPointSet::new(15).is_err());
        assert!(coeff_matrix(8, FormKind::Q).is_err());
        let p = TestPointSet::new(17).unwrap();
        assert_eq!(p.x3.norm_sq(), qi(16));
        assert_eq!(p.x2.norm_sq(), qi(16));
        assert_eq!(p.x1.norm_sq(), qi(1));
    }

    #[test]
    fn farkas_rejections() {
        let p17 = coeff_matrix(17, FormKind::Q).unwrap();
        assert!(matches!(
            farkas_verify(&p17, &[qi(1), qi(0), qi(0)]),
            Err(Error::CertificateInvalid(_))
        ));
        assert!(farkas_verify(&p17, &[qi(1), qi(0)]).is_err());
    }

    #[test]
    fn zero_rhs_feasible_at_zero() {
        let mut p = coeff_matrix(16, FormKind::Q).unwrap();
        p.b = vec![qi(0); 3];
        assert_eq!(
            feasibility_solve(&p).unwrap(),
            FeasibilityOutcome::Feasible(vec![qi(0); 8])
        );
    }

    #[test]
    fn rank_deficient_input_rejected() {
        let mut p = coeff_matrix(16, FormKind::Q).unwrap();
        let row0 = p.a.row(0).to_vec();
        for (c, v) in row0.into_iter().enumerate() {
            p.a[(1, c)] = v;
        }
        assert!(matches!(feasibility_solve(&p), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn decomposition_rejects_bad_lambda() {
        assert!(!verify_decomposition(16, &vec![qi(0); 8], 1, 0).unwrap());
        let mut l = known_k16_lambda();
        l[7] += qi(1);
        assert!(!verify_decomposition(16, &l, 5, 0).unwrap());
        l[7] = qi(-1);
        assert!(verify_decomposition(16, &l, 1, 0).is_err());
    }

    #[test]
    fn small_k_systems_reach_rank_three() {
        for k in 2..16 {
            assert_eq!(coeff_matrix_any(k, FormKind::Cs).unwrap().rank(), 3, "k = {k}");
        }
        assert!(coeff_matrix_any(1, FormKind::Cs).is_err());
    }

    #[test]
    fn certificate_round_trip_and_tamper() {
        let c = certify(17).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        back.check().unwrap();
        let mut bad = back.clone();
        bad.b[0] = "1/2".into();
        assert!(bad.check().is_err());
    }
}
