//! Primal–dual interior point method for small dense SDPs in LMI form:
//!
//! ```text
//! dual:    maximize bᵀy  subject to  Z = C − Σ y_i A_i ⪰ 0
//! primal:  minimize ⟨C, X⟩ subject to ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! ```
//!
//! Infeasible start from scaled identities, HKM search direction with a
//! Mehrotra predictor–corrector step.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub struct LmiProblem {
    pub c: DMatrix<f64>,
    pub a: Vec<DMatrix<f64>>,
    pub b: DVector<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct IpmOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LmiSolution {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Relative primal and dual residuals at exit.
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl LmiSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `α` with `M + α D ⪰ 0`, given `M ≻ 0`; infinite if `D ⪰ 0`.
fn max_step(m: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(m.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let scaled = sym(&linv * d * linv.transpose());
    let min = SymmetricEigen::new(scaled).eigenvalues.min();
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

impl LmiProblem {
    fn n(&self) -> usize {
        self.c.nrows()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| inner(ai, x)))
    }

    fn combine(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n();
        self.a
            .iter()
            .zip(y.iter())
            .fold(DMatrix::zeros(n, n), |acc, (ai, yi)| acc + ai * *yi)
    }

    /// `C − Σ y_i A_i`.
    pub fn slack(&self, y: &DVector<f64>) -> DMatrix<f64> {
        &self.c - self.combine(y)
    }

    pub fn solve(&self, opts: IpmOptions) -> Result<LmiSolution> {
        let n = self.n();
        let m = self.a.len();
        if self.b.len() != m || self.a.iter().any(|ai| ai.shape() != (n, n)) {
            return Err(Error::Dimension("LMI data shapes disagree".into()));
        }
        let scale = 1.0
            + self.c.amax()
            + self.a.iter().map(|ai| ai.amax()).fold(0.0, f64::max)
            + self.b.amax();
        let mut x = DMatrix::identity(n, n) * scale;
        let mut z = DMatrix::identity(n, n) * scale;
        let mut y = DVector::zeros(m);
        let norm_b = 1.0 + self.b.norm();
        let norm_c = 1.0 + self.c.norm();

        let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for iter in 0..opts.max_iterations {
            let rp = &self.b - self.apply(&x);
            let rd = &self.c - &z - self.combine(&y);
            let pobj = inner(&self.c, &x);
            let dobj = self.b.dot(&y);
            let pinf = rp.norm() / norm_b;
            let dinf = rd.norm() / norm_c;
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            last = (pinf, dinf, gap);
            if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
                return Ok(LmiSolution {
                    y,
                    x,
                    z,
                    iterations: iter,
                    primal_objective: pobj,
                    dual_objective: dobj,
                    primal_infeasibility: pinf,
                    dual_infeasibility: dinf,
                });
            }

            let zinv = Cholesky::new(z.clone())
                .ok_or_else(|| not_converged(iter, last))?
                .inverse();
            let mu = inner(&x, &z) / n as f64;
            // T_j = X A_j Z⁻¹ and the Schur complement M_ij = ⟨A_i, T_j⟩.
            let t: Vec<DMatrix<f64>> = self.a.iter().map(|aj| &x * aj * &zinv).collect();
            let mut schur = DMatrix::from_fn(m, m, |i, j| inner(&self.a[i], &t[j]));
            schur = sym(schur);
            let schur_chol = Cholesky::new(schur.clone());
            let solve_schur = |rhs: DVector<f64>| -> Option<DVector<f64>> {
                match &schur_chol {
                    Some(c) => Some(c.solve(&rhs)),
                    None => schur.clone().lu().solve(&rhs),
                }
            };
            let x_rd = sym(&x * &rd * &zinv);

            let direction = |r: DMatrix<f64>| -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
                let rhs = &rp - self.apply(&r);
                let dy = solve_schur(rhs)?;
                let dz = &rd - self.combine(&dy);
                let dx = t
                    .iter()
                    .zip(dy.iter())
                    .fold(r, |acc, (tj, dyj)| acc + sym(tj.clone()) * *dyj);
                Some((dx, dy, dz))
            };
            let steps = |dx: &DMatrix<f64>, dz: &DMatrix<f64>| {
                (
                    (0.98 * max_step(&x, dx)).min(1.0),
                    (0.98 * max_step(&z, dz)).min(1.0),
                )
            };

            // Predictor.
            let (dx_a, _, dz_a) =
                direction(-&x - &x_rd).ok_or_else(|| not_converged(iter, last))?;
            let (ap, ad) = steps(&dx_a, &dz_a);
            let mu_aff = inner(&(&x + &dx_a * ap), &(&z + &dz_a * ad)) / n as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector with the second-order term.
            let r = &zinv * (sigma * mu) - &x - &x_rd - sym(&dx_a * &dz_a * &zinv);
            let (dx, dy, dz) = direction(r).ok_or_else(|| not_converged(iter, last))?;
            let (ap, ad) = steps(&dx, &dz);
            x = sym(&x + dx * ap);
            y += dy * ad;
            z = sym(&z + dz * ad);
        }
        Err(not_converged(opts.max_iterations, last))
    }
}

fn not_converged(iterations: usize, (pinf, dinf, gap): (f64, f64, f64)) -> Error {
    Error::NotConverged {
        iterations,
        gap,
        infeasibility: pinf.max(dinf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_eigenvalue_as_sdp() {
        // max y s.t. C − y I ⪰ 0  ⇒  y = λ_min(C)
        let c = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let lmin = SymmetricEigen::new(c.clone()).eigenvalues.min();
        let p = LmiProblem {
            c,
            a: vec![DMatrix::identity(3, 3)],
            b: DVector::from_element(1, 1.0),
        };
        let s = p.solve(IpmOptions::default()).unwrap();
        assert!((s.y[0] - lmin).abs() < 1e-7, "{} vs {lmin}", s.y[0]);
        assert!((s.x.trace() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn two_variable_lmi() {
        // max y1 + y2 s.t. [[1 − y1, 0], [0, 2 − y2]] ⪰ 0
        let e = |i: usize| DMatrix::from_fn(2, 2, |r, c| if r == i && c == i { 1.0 } else { 0.0 });
        let p = LmiProblem {
            c: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
            a: vec![e(0), e(1)],
            b: DVector::from_vec(vec![1.0, 1.0]),
        };
        let s = p.solve(IpmOptions::default()).unwrap();
        assert!((s.dual_objective - 3.0).abs() < 1e-7);
        assert!(s.duality_gap() < 1e-6);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = LmiProblem {
            c: DMatrix::identity(2, 2),
            a: vec![DMatrix::identity(3, 3)],
            b: DVector::from_element(1, 1.0),
        };
        assert!(p.solve(IpmOptions::default()).is_err());
    }
}
