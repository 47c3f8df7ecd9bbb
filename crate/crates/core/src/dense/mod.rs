//! Generic SOS machinery for small dense forms: the largest `γ` with
//! `p − γ‖x‖^{2d}` a sum of squares, sphere extrema, and the resulting gap.

pub mod form;
pub mod sdp;
pub mod sphere;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

pub use form::{
    monomials, motzkin_form, norm_power, parse_form, parse_graph, stable_set_form, DenseForm, Graph,
};
pub use sphere::sphere_extrema;

use crate::error::{Error, Result};
use crate::linalg::to_f64;
use sdp::{IpmOptions, LmiProblem};

pub const DEFAULT_TOL: f64 = 1e-6;

/// Largest monomial basis the dense solver accepts.
pub const MAX_BASIS: usize = 40;

#[derive(Clone, Debug)]
pub struct SdpResult {
    pub gamma: f64,
    /// Gram matrix over [`monomials`]`(n, d)` with `p − γ‖x‖^{2d} = mᵀ G m`.
    pub gram: DMatrix<f64>,
    pub primal_dual_gap: f64,
    /// Largest coefficient mismatch between `p − γ‖x‖^{2d}` and `mᵀ G m`.
    pub residual: f64,
    pub min_gram_eigenvalue: f64,
    pub iterations: usize,
}

/// Pairs `(i, j)`, `i ≤ j`, of basis indices grouped by `β_i + β_j`.
fn pairs_by_exponent(basis: &[Vec<u32>]) -> BTreeMap<Vec<u32>, Vec<(usize, usize)>> {
    let mut out: BTreeMap<Vec<u32>, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let e: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
            out.entry(e).or_default().push((i, j));
        }
    }
    out
}

/// Symmetric matrix whose quadratic form contributes `1` to the monomial of
/// pair `(i, j)`.
fn unit_gram(n: usize, (i, j): (usize, usize)) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    if i == j {
        m[(i, i)] = 1.0;
    } else {
        m[(i, j)] = 0.5;
        m[(j, i)] = 0.5;
    }
    m
}

/// Coefficients of `mᵀ G m` by exponent.
fn expand_gram(g: &DMatrix<f64>, pairs: &BTreeMap<Vec<u32>, Vec<(usize, usize)>>) -> BTreeMap<Vec<u32>, f64> {
    pairs
        .iter()
        .map(|(e, ps)| {
            let v = ps
                .iter()
                .map(|&(i, j)| if i == j { g[(i, i)] } else { g[(i, j)] + g[(j, i)] })
                .sum();
            (e.clone(), v)
        })
        .collect()
}

/// `p_min^sos = max γ` such that `p − γ‖x‖^{2d}` is SOS.
///
/// Gram matrices of `p − γ‖x‖^{2d}` form the affine family
/// `G_p − γ W + Σ z_t B_t`, with `G_p` a particular Gram matrix of `p`, `W`
/// the diagonal multinomial Gram matrix of `‖x‖^{2d}`, and `B_t` spanning the
/// matrices whose quadratic form vanishes. Maximizing `γ` over the PSD part of
/// that family is an LMI.
pub fn sos_lower_bound(p: &DenseForm, tol: f64) -> Result<SdpResult> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let basis = monomials(p.n(), p.d());
    let nb = basis.len();
    if nb > MAX_BASIS {
        return Err(Error::InvalidArgument(format!(
            "monomial basis of size {nb} exceeds {MAX_BASIS}"
        )));
    }
    let pairs = pairs_by_exponent(&basis);

    let mut c = DMatrix::zeros(nb, nb);
    for (e, coeff) in p.coeffs() {
        let first = pairs[e][0];
        c += unit_gram(nb, first) * to_f64(coeff);
    }
    let w = DMatrix::from_diagonal(&DVector::from_iterator(
        nb,
        basis.iter().map(|b| to_f64(&form::multinomial(b))),
    ));
    let mut a = vec![w];
    for ps in pairs.values() {
        for &other in &ps[1..] {
            // Moves weight from the first pair to `other`; the form is unchanged.
            a.push(unit_gram(nb, ps[0]) - unit_gram(nb, other));
        }
    }
    let mut b = DVector::zeros(a.len());
    b[0] = 1.0;
    let problem = LmiProblem { c, a, b };
    let sol = problem.solve(IpmOptions {
        tol: tol * 1e-2,
        max_iterations: 200,
    })?;

    let gamma = sol.y[0];
    let gram = problem.slack(&sol.y);
    let w_form = norm_power(p.n(), p.d());
    let expanded = expand_gram(&gram, &pairs);
    let residual = expanded
        .iter()
        .map(|(e, v)| {
            let want = to_f64(&p.coeff(e)) - gamma * to_f64(&w_form.coeff(e));
            (v - want).abs()
        })
        .fold(0.0, f64::max);
    let min_gram_eigenvalue = SymmetricEigen::new(gram.clone()).eigenvalues.min();
    if residual > tol || min_gram_eigenvalue < -tol {
        return Err(Error::NotConverged {
            iterations: sol.iterations,
            gap: sol.duality_gap(),
            infeasibility: residual.max(-min_gram_eigenvalue),
        });
    }
    Ok(SdpResult {
        gamma,
        gram,
        primal_dual_gap: sol.duality_gap(),
        residual,
        min_gram_eigenvalue,
        iterations: sol.iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapEstimate {
    pub min: f64,
    pub max: f64,
    pub sos_bound: f64,
    pub gap: f64,
}

/// Sphere extrema and SOS bound, without forming the ratio.
pub fn extrema_and_bound(p: &DenseForm, tol: f64, seed: u64) -> Result<(f64, f64, SdpResult)> {
    let (min, max) = sphere_extrema(p, seed);
    Ok((min, max, sos_lower_bound(p, tol)?))
}

/// `(p_max − p_min^sos) / (p_max − p_min)`.
pub fn gap_estimate(p: &DenseForm, tol: f64, seed: u64) -> Result<GapEstimate> {
    let (min, max, sdp) = extrema_and_bound(p, tol, seed)?;
    if max - min <= tol * max.abs().max(1.0) {
        return Err(Error::UndefinedGap { max, min });
    }
    Ok(GapEstimate {
        min,
        max,
        sos_bound: sdp.gamma,
        gap: (max - sdp.gamma) / (max - min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_power_has_bound_one() {
        let r = sos_lower_bound(&norm_power(3, 2), DEFAULT_TOL).unwrap();
        assert!((r.gamma - 1.0).abs() < DEFAULT_TOL, "{}", r.gamma);
        assert!(r.residual <= DEFAULT_TOL);
        assert!(matches!(
            gap_estimate(&norm_power(3, 2), DEFAULT_TOL, 0),
            Err(Error::UndefinedGap { .. })
        ));
    }

    #[test]
    fn motzkin_bound_is_negative() {
        let r = sos_lower_bound(&motzkin_form(), DEFAULT_TOL).unwrap();
        assert!(r.gamma < 0.0, "{}", r.gamma);
        assert!(r.min_gram_eigenvalue >= -DEFAULT_TOL);
    }

    #[test]
    fn motzkin_extrema() {
        let (min, max) = sphere_extrema(&motzkin_form(), 0);
        assert!(min.abs() < 1e-6, "{min}");
        assert!(max >= 1.0);
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(sos_lower_bound(&motzkin_form(), 0.0).is_err());
    }
}
