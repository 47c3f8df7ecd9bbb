//! Regression checks for the convexity of `q_k`.
//!
//! Convexity is a theorem, so a failure here points at an implementation
//! error. The window and midpoint checks are exact; the Hessian check uses a
//! floating symmetric eigensolve.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::certificate::TestPointSet;
use crate::clifford::DIM;
use crate::error::{Error, Result};
use crate::forms::{cs_eval_octonion, hessian_matrix, q_eval, MatrixPoint};
use crate::linalg::{fmt_rational, q, to_f64, Matrix, Q};
use crate::sampling::{random_rational_matrix, random_unit_matrix, Rng};

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub k: usize,
    pub num_samples: usize,
    pub min_hessian_eig: f64,
    /// Smallest `λ_min(H) / ‖H‖₂` seen, the quantity compared with `−tol`.
    pub min_relative_eig: f64,
    pub min_midpoint_slack: f64,
    pub window_ok: bool,
}

/// Outcome of the window check: exact extremes of `(8/3) q_k / ‖X‖⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCheck {
    pub lower_attained: bool,
    pub upper_attained: bool,
    pub sampled_min: Q,
    pub sampled_max: Q,
    pub samples: usize,
}

impl WindowCheck {
    pub fn ok(&self) -> bool {
        self.lower_attained
            && self.upper_attained
            && self.sampled_min >= window_lower()
            && self.sampled_max <= window_upper()
    }
}

/// `1 − 1/(2d−1)` at `d = 2`.
pub fn window_lower() -> Q {
    q(2, 3)
}

/// `1 + 1/(2d−1)` at `d = 2`.
pub fn window_upper() -> Q {
    q(4, 3)
}

/// `(8/3) q_k(X) / ‖X‖⁴`, the affine rescaling that maps `[p_min, p_max] =
/// [0, 1/4]` of `cs_k` onto the window. Undefined at `X = 0`.
pub fn normalized_q(x: &MatrixPoint) -> Result<Q> {
    let n = x.norm_sq();
    if n.is_zero() {
        return Err(Error::InvalidArgument("normalization undefined at X = 0".into()));
    }
    Ok(q(8, 3) * q_eval(x) / (&n * &n))
}

/// `‖x‖²‖y‖²` and `¼(‖x‖² + ‖y‖²)²` sandwich `cs_k`; checked exactly.
fn cs_bounds_hold(x: &MatrixPoint) -> bool {
    let (xs, ys) = x.xy();
    let (a, b) = (xs.norm_sq(), ys.norm_sq());
    let cs = cs_eval_octonion(x);
    let sum = &a + &b;
    let am_gm = q(1, 4) * &sum * &sum;
    let prod = a * b;
    !cs.is_negative() && cs <= prod && prod <= am_gm
}

/// Exact check that the normalized form stays in `[2/3, 4/3]`, that both
/// endpoints are attained (`y = 0` gives 2/3, the `X_3`-type point gives 4/3),
/// and that the `cs_k` bounds hold at every sample.
pub fn convexity_window_check(k: usize, num_samples: usize, seed: u64) -> Result<WindowCheck> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let named = TestPointSet::truncated(k);
    // Only x is populated in X_1, so cs = 0.
    let lower_attained = normalized_q(&named.x1)? == window_lower();
    // X_3 balances x and y with ⟨x, y⟩ = 0 once it has at least two columns.
    let upper_attained = k < 2 || normalized_q(&named.x3)? == window_upper();

    let mut rng = Rng::seeded(seed);
    let mut sampled_min = window_upper();
    let mut sampled_max = window_lower();
    for _ in 0..num_samples {
        let x = MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k))?;
        if x.norm_sq().is_zero() {
            continue;
        }
        if !cs_bounds_hold(&x) {
            return Err(Error::IdentityMismatch("cs_k bounds violated".into()));
        }
        let v = normalized_q(&x)?;
        if v < sampled_min {
            sampled_min = v.clone();
        }
        if v > sampled_max {
            sampled_max = v;
        }
    }
    Ok(WindowCheck {
        lower_attained,
        upper_attained,
        sampled_min,
        sampled_max,
        samples: num_samples,
    })
}

/// Minimum eigenvalue and spectral norm of the Hessian at `x`.
pub fn hessian_spectrum(x: &Matrix<f64>) -> Result<(f64, f64)> {
    let h = hessian_matrix(x);
    if !h.is_symmetric() {
        return Err(Error::IdentityMismatch("Hessian is not symmetric".into()));
    }
    let n = h.rows();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, h.as_slice()));
    let min = eig.eigenvalues.min();
    let norm = eig.eigenvalues.amax();
    Ok((min, norm))
}

fn refuted(sample: usize, min: f64, threshold: f64) -> Error {
    Error::ConvexityRefuted {
        sample,
        eigenvalue: min,
        threshold,
    }
}

/// Samples unit-norm `X` and checks `λ_min(H) ≥ −tol·‖H‖₂` at each.
pub fn hessian_psd_sample(k: usize, num_points: usize, tol: f64, seed: u64) -> Result<ConvexityReport> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if num_points == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = Rng::seeded(seed);
    let mut min_eig = f64::INFINITY;
    let mut min_rel = f64::INFINITY;
    for sample in 0..num_points {
        let x = random_unit_matrix(&mut rng, DIM, k);
        let (min, norm) = hessian_spectrum(&x)?;
        let threshold = -tol * norm;
        if min < threshold {
            return Err(refuted(sample, min, threshold));
        }
        min_eig = min_eig.min(min);
        if norm > 0.0 {
            min_rel = min_rel.min(min / norm);
        }
    }
    Ok(ConvexityReport {
        k,
        num_samples: num_points,
        min_hessian_eig: min_eig,
        min_relative_eig: min_rel,
        min_midpoint_slack: f64::NAN,
        window_ok: false,
    })
}

/// `(q(X) + q(Y))/2 − q((X+Y)/2)`, exactly.
pub fn midpoint_slack(x: &MatrixPoint, y: &MatrixPoint) -> Result<Q> {
    let mid = MatrixPoint::new((x.matrix() + y.matrix()).scale(&q(1, 2)))?;
    Ok((q_eval(x) + q_eval(y)) / Q::from_integer(2.into()) - q_eval(&mid))
}

/// Minimum exact midpoint slack over random rational pairs.
pub fn midpoint_convexity_sample(k: usize, num_pairs: usize, seed: u64) -> Result<Q> {
    if num_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let mut rng = Rng::seeded(seed);
    let mut best: Option<Q> = None;
    for _ in 0..num_pairs {
        let x = MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k))?;
        let y = MatrixPoint::new(random_rational_matrix(&mut rng, DIM, k))?;
        let s = midpoint_slack(&x, &y)?;
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    Ok(best.expect("num_pairs > 0"))
}

/// Runs all three checks and fails on the first refutation.
pub fn convexity_report(k: usize, num_samples: usize, tol: f64, seed: u64) -> Result<ConvexityReport> {
    let window = convexity_window_check(k, num_samples, seed)?;
    let mut report = hessian_psd_sample(k, num_samples, tol, seed)?;
    let slack = midpoint_convexity_sample(k, num_samples, seed)?;
    if slack.is_negative() {
        return Err(Error::IdentityMismatch(format!(
            "negative midpoint slack {}",
            fmt_rational(&slack)
        )));
    }
    report.min_midpoint_slack = to_f64(&slack);
    report.window_ok = window.ok();
    Ok(report)
}
