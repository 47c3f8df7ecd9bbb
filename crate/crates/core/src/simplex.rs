//! Exact two-phase simplex over the rationals with Bland's anti-cycling rule.
//!
//! Solves `maximize cᵀx subject to A x = b, x ≥ 0` and reports either an
//! optimal primal/dual pair, a Farkas row proving infeasibility, or
//! unboundedness. Problems here have a handful of rows, so a dense tableau
//! that keeps the artificial columns (and with them `B⁻¹`) is plenty.

use num_traits::{One, Signed, Zero};

use crate::linalg::{Matrix, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Q>,
        value: Q,
        /// `y` with `yᵀA ≥ c` componentwise and `yᵀb = value`.
        dual: Vec<Q>,
    },
    /// `y` with `yᵀA ≥ 0` and `yᵀb < 0`.
    Infeasible { farkas: Vec<Q> },
    Unbounded,
}

struct Tableau {
    rows: usize,
    /// Number of structural columns; artificials follow.
    n: usize,
    t: Matrix<Q>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(a: &Matrix<Q>, b: &[Q], flip: &[bool]) -> Self {
        let (rows, n) = a.shape();
        let t = Matrix::from_fn(rows, n + rows, |r, c| {
            if c >= n {
                return if c - n == r { Q::one() } else { Q::zero() };
            }
            if flip[r] {
                -a[(r, c)].clone()
            } else {
                a[(r, c)].clone()
            }
        });
        let rhs = b
            .iter()
            .zip(flip)
            .map(|(v, &f)| if f { -v.clone() } else { v.clone() })
            .collect();
        Self {
            rows,
            n,
            t,
            rhs,
            basis: (n..n + rows).collect(),
        }
    }

    fn cols(&self) -> usize {
        self.n + self.rows
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[(row, col)].clone();
        for c in 0..self.cols() {
            self.t[(row, c)] = &self.t[(row, c)] / &p;
        }
        self.rhs[row] = &self.rhs[row] / &p;
        for r in 0..self.rows {
            if r == row || self.t[(r, col)].is_zero() {
                continue;
            }
            let factor = self.t[(r, col)].clone();
            for c in 0..self.cols() {
                if !self.t[(row, c)].is_zero() {
                    let delta = &factor * &self.t[(row, c)];
                    self.t[(r, c)] -= delta;
                }
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Simplex multipliers `c_Bᵀ B⁻¹`, read from the artificial columns.
    fn multipliers(&self, cost: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| {
                (0..self.rows)
                    .map(|r| &cost[self.basis[r]] * &self.t[(r, self.n + i)])
                    .sum()
            })
            .collect()
    }

    fn reduced_cost(&self, cost: &[Q], col: usize) -> Q {
        (0..self.rows).fold(cost[col].clone(), |acc, r| {
            acc - &cost[self.basis[r]] * &self.t[(r, col)]
        })
    }

    /// Runs Bland's rule over the first `allowed` columns. Returns `false` on
    /// unboundedness.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.reduced_cost(cost, j).is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for r in 0..self.rows {
                let a = &self.t[(r, col)];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn primal(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.n];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.rhs[r].clone();
            }
        }
        x
    }
}

/// `maximize cᵀx` subject to `A x = b`, `x ≥ 0`, exactly.
pub fn solve(a: &Matrix<Q>, b: &[Q], c: &[Q]) -> LpOutcome {
    let (rows, n) = a.shape();
    assert_eq!(b.len(), rows, "rhs length");
    assert_eq!(c.len(), n, "cost length");
    let flip: Vec<bool> = b.iter().map(Signed::is_negative).collect();
    let mut tab = Tableau::new(a, b, &flip);
    let unflip = |y: Vec<Q>| -> Vec<Q> {
        y.into_iter()
            .zip(&flip)
            .map(|(v, &f)| if f { -v } else { v })
            .collect()
    };

    // Phase 1: maximize −Σ artificials.
    let phase1: Vec<Q> = (0..n + rows)
        .map(|j| if j < n { Q::zero() } else { -Q::one() })
        .collect();
    tab.optimize(&phase1, n + rows);
    let infeasibility: Q = (0..rows)
        .filter(|&r| tab.basis[r] >= n)
        .map(|r| tab.rhs[r].clone())
        .sum();
    if infeasibility.is_positive() {
        // Phase-1 optimality: yᵀA' ≥ 0 on structural columns, yᵀb' = −infeasibility.
        let farkas = unflip(tab.multipliers(&phase1));
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis where possible; rows where
    // that fails are redundant and keep their artificial at zero.
    for r in 0..rows {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !tab.t[(r, j)].is_zero()) {
                tab.pivot(r, col);
            }
        }
    }

    let phase2: Vec<Q> = (0..n + rows)
        .map(|j| if j < n { c[j].clone() } else { Q::zero() })
        .collect();
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let x = tab.primal();
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    let dual = unflip(tab.multipliers(&phase2));
    LpOutcome::Optimal { x, value, dual }
}

/// Feasibility of `{x ≥ 0 : A x = b}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Q>),
    Infeasible(Vec<Q>),
}

pub fn feasibility(a: &Matrix<Q>, b: &[Q]) -> Feasibility {
    let zero = vec![Q::zero(); a.cols()];
    match solve(a, b, &zero) {
        LpOutcome::Optimal { x, .. } => Feasibility::Feasible(x),
        LpOutcome::Infeasible { farkas } => Feasibility::Infeasible(farkas),
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    }
}

/// `yᵀ A`.
pub fn row_times(y: &[Q], a: &Matrix<Q>) -> Vec<Q> {
    (0..a.cols())
        .map(|c| y.iter().enumerate().map(|(r, yr)| yr * &a[(r, c)]).sum())
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
