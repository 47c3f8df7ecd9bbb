use super::form::DenseForm;
use crate::sampling::Rng;

const RANDOM_STARTS: usize = 64;
const MAX_STEPS: usize = 4000;

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Deterministic starts (coordinate axes, `(e_i ± e_j)/√2`, sign patterns of
/// the all-ones vector) followed by seeded Gaussian directions.
fn starts(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        out.push(v);
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v[j] = s;
                out.push(v);
            }
        }
    }
    for mask in 0u32..1 << (n - 1) {
        out.push((0..n).map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 }).collect());
    }
    let mut rng = Rng::seeded(seed);
    for _ in 0..RANDOM_STARTS {
        out.push((0..n).map(|_| rng.normal()).collect());
    }
    out.iter_mut().for_each(|v| normalize(v));
    out
}

/// Riemannian gradient descent of `sign·p` from `x` with Armijo backtracking.
fn descend(p: &DenseForm, sign: f64, mut x: Vec<f64>) -> f64 {
    let f = |x: &[f64]| sign * p.eval_f64(x);
    let mut fx = f(&x);
    let mut step = 1.0;
    for _ in 0..MAX_STEPS {
        let g: Vec<f64> = p.gradient_f64(&x).iter().map(|v| sign * v).collect();
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        let rg: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| gi - radial * xi).collect();
        let rg2: f64 = rg.iter().map(|v| v * v).sum();
        if rg2 < 1e-28 {
            break;
        }
        step *= 2.0;
        loop {
            let mut cand: Vec<f64> = x.iter().zip(&rg).map(|(xi, gi)| xi - step * gi).collect();
            normalize(&mut cand);
            let fc = f(&cand);
            if fc <= fx - 1e-4 * step * rg2 {
                x = cand;
                fx = fc;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return fx * sign;
            }
        }
    }
    fx * sign
}

/// Best minimum and maximum of `p` on the unit sphere found by multistart
/// local descent.
pub fn sphere_extrema(p: &DenseForm, seed: u64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in starts(p.n(), seed) {
        lo = lo.min(descend(p, 1.0, x.clone()));
        hi = hi.max(descend(p, -1.0, x));
    }
    (lo, hi)
}
