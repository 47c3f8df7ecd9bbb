//! Library results against independent, deliberately naive oracles.

use num_traits::{Signed, Zero};

use octosos::certificate::{
    coeff_matrix, coeff_matrix_any, farkas_verify, feasibility_solve, gap_closed_form, gap_invariant,
    known_farkas_row, sos_min_invariant, ConeProblem, FeasibilityOutcome, FormKind, TestPointSet,
};
use octosos::clifford::{CliffordSystem, DIM, NORM_SQ};
use octosos::decomposition::{u_basis, LambdaPair, SGenerators, LAMBDA};
use octosos::dense::{self, sos_lower_bound, sphere_extrema, stable_set_form, Graph};
use octosos::forms::MatrixPoint;
use octosos::linalg::{q, qi, Matrix, Q};
use octosos::sampling::{random_rational_matrix, Rng};

/// Solves a square rational system by Gaussian elimination; `None` if singular.
fn solve_square(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = rhs.len();
    let mut a: Vec<Vec<Q>> = m.iter().zip(rhs).map(|(r, b)| {
        let mut r = r.clone();
        r.push(b.clone());
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some((0..n).map(|r| &a[r][n] / &a[r][r]).collect())
}

fn column(a: &Matrix<Q>, j: usize) -> Vec<Q> {
    (0..a.rows()).map(|r| a[(r, j)].clone()).collect()
}

fn square_from_columns(cols: &[Vec<Q>]) -> Vec<Vec<Q>> {
    (0..cols[0].len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// Feasibility of `A λ = b, λ ≥ 0` (rank 3) by trying every basis.
fn feasible_by_bases(p: &ConeProblem) -> bool {
    let n = p.a.cols();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let cols = [column(&p.a, i), column(&p.a, j), column(&p.a, k)];
                if let Some(x) = solve_square(&square_from_columns(&cols), &p.b) {
                    if x.iter().all(|v| !v.is_negative()) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// `max γ` with `b − γ n ∈ cone(A)`: γ is free, so some optimal basis
/// contains it together with two columns of `A`.
fn sos_min_by_bases(p: &ConeProblem) -> Q {
    let n4 = p.norm4_column();
    let mut best: Option<Q> = None;
    for i in 0..8 {
        for j in i + 1..8 {
            let cols = [n4.clone(), column(&p.a, i), column(&p.a, j)];
            if let Some(x) = solve_square(&square_from_columns(&cols), &p.b) {
                if !x[1].is_negative() && !x[2].is_negative() && best.as_ref().is_none_or(|b| x[0] > *b) {
                    best = Some(x[0].clone());
                }
            }
        }
    }
    best.expect("some basis is feasible")
}

#[test]
fn feasibility_matches_basis_enumeration() {
    for k in 16..=24 {
        let p = coeff_matrix(k, FormKind::Q).unwrap();
        let solver = matches!(feasibility_solve(&p).unwrap(), FeasibilityOutcome::Feasible(_));
        assert_eq!(solver, feasible_by_bases(&p), "k = {k}");
        assert_eq!(solver, k == 16);
    }
}

#[test]
fn perturbed_right_hand_sides_agree() {
    let mut rng = Rng::seeded(31);
    let base = coeff_matrix(17, FormKind::Q).unwrap();
    for _ in 0..40 {
        let mut p = base.clone();
        p.b = p.b.iter().map(|v| v + rng.rational() * qi(8)).collect();
        let outcome = feasibility_solve(&p).unwrap();
        assert_eq!(matches!(outcome, FeasibilityOutcome::Feasible(_)), feasible_by_bases(&p));
    }
}

#[test]
fn sos_min_matches_basis_enumeration() {
    for k in 2..=24 {
        let p = coeff_matrix_any(k, FormKind::Cs).unwrap();
        assert_eq!(sos_min_invariant(k).unwrap(), sos_min_by_bases(&p), "k = {k}");
    }
}

#[test]
fn sos_min_is_nonincreasing_and_matches_shift_criterion() {
    let values: Vec<Q> = (2..=24).map(|k| sos_min_invariant(k).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]));
    for k in 16..=24 {
        // q_k = cs_k + ¼‖X‖⁴ is SOS iff the bound reaches −1/4.
        let shifted_sos = sos_min_invariant(k).unwrap() >= q(-1, 4);
        let feasible = matches!(
            feasibility_solve(&coeff_matrix(k, FormKind::Q).unwrap()).unwrap(),
            FeasibilityOutcome::Feasible(_)
        );
        assert_eq!(shifted_sos, feasible, "k = {k}");
    }
    assert!(gap_invariant(24).unwrap() < q(15, 7));
    assert_eq!(gap_invariant(17).unwrap(), q(255, 127));
    assert_eq!(gap_closed_form(16), qi(2));
}

#[test]
fn known_row_fails_where_system_is_feasible() {
    let p16 = coeff_matrix(16, FormKind::Q).unwrap();
    assert!(farkas_verify(&p16, &known_farkas_row()).is_err());
    let p17 = coeff_matrix(17, FormKind::Q).unwrap();
    assert!(farkas_verify(&p17, &[qi(1), qi(0), qi(0)]).is_err());
}

/// `s_ij` straight from dense rational matrices.
fn s_dense(pair: LambdaPair, x: &Matrix<Q>) -> Q {
    let k = x.cols();
    let sys = CliffordSystem::standard();
    let fs: Vec<(Matrix<Q>, Q)> = u_basis(pair.side, k)
        .unwrap()
        .iter()
        .map(|f| (f.matrix::<Q>(), f.norm_sq()))
        .collect();
    let xt = x.transpose();
    let mut total = Q::zero();
    for e in &sys.v_basis(pair.level).unwrap().elements {
        let m = &(&xt * &e.entries::<Q>()) * x;
        for (f, nf) in &fs {
            let c = m.frobenius_inner(f);
            total += &c * &c / (qi(NORM_SQ) * nf);
        }
    }
    total
}

#[test]
fn generator_values_match_dense_evaluation() {
    let mut rng = Rng::seeded(4);
    let mut points: Vec<MatrixPoint> = Vec::new();
    for k in [2, 3] {
        for _ in 0..2 {
            points.push(MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k)).unwrap());
        }
    }
    points.push(TestPointSet::new(17).unwrap().x2);
    for x in &points {
        let gens = SGenerators::standard(x.k()).unwrap();
        let fast = gens.eval_all(x).unwrap();
        for (pair, value) in LAMBDA.iter().zip(fast.iter()) {
            assert_eq!(*value, s_dense(*pair, x.matrix()), "{pair} at k = {}", x.k());
        }
    }
}

#[test]
fn stable_set_minimum_matches_independence_number() {
    let mut rng = Rng::seeded(12);
    let mut graphs = vec![Graph::complete(3), Graph::cycle(5), Graph::empty(4), Graph::cycle(6)];
    for n in 3..=6 {
        for _ in 0..3 {
            let edges = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.coin())
                .collect();
            graphs.push(Graph::new(n, edges).unwrap());
        }
    }
    for g in graphs {
        let (min, _) = sphere_extrema(&stable_set_form(&g), 0);
        let alpha = g.independence_number() as f64;
        assert!((min - 1.0 / alpha).abs() <= 1e-4, "{g:?}: min {min}, alpha {alpha}");
    }
}

#[test]
fn sos_bound_is_sound_on_sampled_sphere_points() {
    let tol = dense::DEFAULT_TOL;
    let mut rng = Rng::seeded(13);
    for p in [dense::motzkin_form(), stable_set_form(&Graph::cycle(5))] {
        let r = sos_lower_bound(&p, tol).unwrap();
        assert!(r.residual <= tol && r.min_gram_eigenvalue >= -tol);
        for _ in 0..500 {
            let mut x: Vec<f64> = (0..p.n()).map(|_| rng.normal()).collect();
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= n);
            assert!(p.eval_f64(&x) >= r.gamma - 10.0 * tol);
        }
    }
}
