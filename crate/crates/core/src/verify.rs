//! Exact identity suite for the octonion table and the Clifford system built
//! from it. Each check is reported by name so a broken table points at the
//! relation it violates.

use serde::Serialize;

use crate::clifford::{build_s_dense, build_sj, subsets, CliffordSystem, DIM, NORM_SQ, NUM_GENERATORS};
use crate::error::Result;
use crate::linalg::{Matrix, Q};
use crate::octonion::{MulTable, Octonion};
use crate::sampling::{random_octonion, Rng};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AlgebraReport {
    pub checks: Vec<Check>,
}

impl AlgebraReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Octonion identities checked exactly on `samples` random rational triples.
fn octonion_checks(table: &MulTable, samples: usize, seed: u64, report: &mut AlgebraReport) {
    let mul = |a: &Octonion, b: &Octonion| table.mul(a, b);
    let mut rng = Rng::seeded(seed);
    let mut failures = [0usize; 5];
    for _ in 0..samples {
        let (a, b, c) = (
            random_octonion(&mut rng),
            random_octonion(&mut rng),
            random_octonion(&mut rng),
        );
        let rb = table.right_mult_matrix(&b);
        let col = rb.apply(&a.coords);
        if col[..] != mul(&a, &b).coords[..] {
            failures[0] += 1;
        }
        if mul(&a, &b).norm_sq() != a.norm_sq() * b.norm_sq() {
            failures[1] += 1;
        }
        let aa = mul(&a, &a);
        if mul(&a, &mul(&a, &b)) != mul(&aa, &b) || mul(&mul(&b, &a), &a) != mul(&b, &aa) {
            failures[2] += 1;
        }
        let left = mul(&a, &b).inner(&c) == b.inner(&mul(&a.conj(), &c));
        let right = mul(&b, &a).inner(&c) == b.inner(&mul(&c, &a.conj()));
        if !(left && right) {
            failures[3] += 1;
        }
        if table.right_mult_matrix(&b.conj()) != rb.transpose() {
            failures[4] += 1;
        }
    }
    let names = [
        "right multiplication matrix matches product",
        "norm is multiplicative",
        "alternativity",
        "left and right multiplication adjointness",
        "conjugate right multiplication is the transpose",
    ];
    for (name, f) in names.iter().zip(failures) {
        report.push(*name, f == 0, format!("{}/{samples} samples exact", samples - f));
    }
    let e0 = table.right_mult_matrix(&Octonion::unit(0)) == Matrix::<Q>::identity(8);
    report.push("unit right multiplication is the identity", e0, "");
}

fn clifford_checks(table: &MulTable, report: &mut AlgebraReport) -> Result<()> {
    let s: Vec<Matrix<i64>> = (0..NUM_GENERATORS)
        .map(|i| build_s_dense(table, i))
        .collect::<Result<_>>()?;
    let id = Matrix::<i64>::identity(DIM);
    let mut violated = Vec::new();
    for i in 0..NUM_GENERATORS {
        for j in 0..NUM_GENERATORS {
            let anti = &s[i].matmul(&s[j]) + &s[j].matmul(&s[i]);
            let expected = if i == j { id.scale(&2) } else { Matrix::zeros(DIM, DIM) };
            if anti != expected {
                violated.push(format!("S_{i}S_{j} + S_{j}S_{i}"));
            }
        }
    }
    let total = NUM_GENERATORS * NUM_GENERATORS;
    let detail = if violated.is_empty() {
        format!("{total}/{total} Clifford relations exact")
    } else {
        format!(
            "{}/{total} Clifford relations exact; violated: {}",
            total - violated.len(),
            violated.join(", ")
        )
    };
    report.push("Clifford relations", violated.is_empty(), detail);

    let symmetric = s.iter().all(|m| m.is_symmetric());
    report.push("generators are symmetric", symmetric, "");

    let all: Vec<usize> = (0..NUM_GENERATORS).collect();
    let product = build_sj(table, &all)?.dense_i64();
    let found = if product == id {
        "+I"
    } else if product == id.scale(&-1) {
        "-I"
    } else {
        "not a multiple of I"
    };
    report.push(
        "S_0 S_1 ... S_8 = -I",
        product == id.scale(&-1),
        format!("product is {found}"),
    );

    let system = CliffordSystem::new(table)?;
    let basis: Vec<_> = system.all_basis().collect();
    let mut bad = 0usize;
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate().skip(a) {
            let want = if a == b { NORM_SQ } else { 0 };
            if x.inner_with(y) != want {
                bad += 1;
            }
        }
    }
    let counts: Vec<usize> = (0..=4).map(|l| subsets(NUM_GENERATORS, l).len()).collect();
    report.push(
        "S_J orthogonal with squared norm 16",
        bad == 0 && basis.len() == 256,
        format!("{} elements (levels {counts:?}), {bad} bad pairs", basis.len()),
    );

    let classes_ok = basis.iter().all(|m| {
        let sym = matches!(m.subset().len(), 0 | 1 | 4);
        let d = m.dense_i64();
        if sym {
            d.is_symmetric()
        } else {
            d.is_skew()
        }
    });
    report.push("S_J symmetric for |J| in {0,1,4}, skew for {2,3}", classes_ok, "");
    Ok(())
}

/// Runs the octonion and Clifford checks against `table`.
pub fn verify_algebra_with(table: &MulTable, samples: usize, seed: u64) -> Result<AlgebraReport> {
    let mut report = AlgebraReport::default();
    octonion_checks(table, samples, seed, &mut report);
    clifford_checks(table, &mut report)?;
    Ok(report)
}

pub fn verify_algebra(seed: u64) -> Result<AlgebraReport> {
    verify_algebra_with(&MulTable::standard(), 100, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check<'a>(r: &'a AlgebraReport, name: &str) -> &'a Check {
        r.checks.iter().find(|c| c.name == name).unwrap()
    }

    #[test]
    fn standard_table_relations() {
        let r = verify_algebra_with(&MulTable::standard(), 20, 0).unwrap();
        let rel = check(&r, "Clifford relations");
        assert!(rel.passed);
        assert_eq!(rel.detail, "81/81 Clifford relations exact");
        assert!(check(&r, "S_J orthogonal with squared norm 16").passed);
        assert!(check(&r, "norm is multiplicative").passed);
    }

    #[test]
    fn corrupted_table_is_named() {
        let r = verify_algebra_with(&MulTable::with_flipped_sign(1, 2), 20, 0).unwrap();
        assert!(!r.all_passed());
        let rel = check(&r, "Clifford relations");
        assert!(!rel.passed);
        assert!(rel.detail.contains("violated: S_"), "{}", rel.detail);
    }
}
