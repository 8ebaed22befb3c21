#![allow(dead_code)]

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use solvlat::exact::{ExactMatrix, ExactScalar};
use solvlat::group::DiagSystem;
use solvlat::lattice::{CompatiblePair, Lattice};

pub fn golden() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

/// `Δ = diag(ln λ, -ln λ)` for `λ = (3 + √5)/2`.
pub fn golden_system() -> DiagSystem {
    let l = golden().ln();
    DiagSystem::validate(DMatrix::from_column_slice(2, 1, &[l, -l])).unwrap()
}

pub fn half(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Eigenvector matrix of `[[2,1],[1,1]]`, columns for `λ` then `1/λ`.
pub fn golden_sigma_exact() -> ExactMatrix {
    let a = ExactScalar::quadratic(half(1, 2), half(1, 2), 5).unwrap();
    let b = ExactScalar::quadratic(half(1, 2), half(-1, 2), 5).unwrap();
    ExactMatrix::from_rows(vec![vec![a, b], vec![ExactScalar::one(), ExactScalar::one()]]).unwrap()
}

pub fn golden_multiplier(power: i64) -> ExactMatrix {
    let l1 = ExactScalar::quadratic(half(3, 2), half(1, 2), 5).unwrap();
    let l2 = ExactScalar::quadratic(half(3, 2), half(-1, 2), 5).unwrap();
    ExactMatrix::diagonal(vec![l1.pow(power).unwrap(), l2.pow(power).unwrap()]).unwrap()
}

pub fn golden_pair() -> CompatiblePair {
    CompatiblePair::verify(&golden_system(), &golden_sigma_exact().to_f64(), &DMatrix::identity(1, 1), 1e-9).unwrap()
}

pub fn golden_lattice() -> Lattice {
    Lattice::new(golden_pair())
}

/// Independent integer 2x2 product used as an oracle.
pub fn mul2(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn golden_exact_pair() -> CompatiblePair {
    CompatiblePair::verify_exact(&golden_system(), &golden_sigma_exact(), &[golden_multiplier(1)]).unwrap()
}

pub fn golden_exact_lattice() -> Lattice {
    Lattice::new(golden_exact_pair())
}

/// `(λσ, qρ)` over the exact golden pair.
pub fn golden_scaled(lambda: &ExactScalar, q: i64) -> Lattice {
    Lattice::new(golden_exact_pair().scaled_exact(lambda, q).unwrap())
}

/// A system with no coordinate symmetry.
pub fn asymmetric_system() -> DiagSystem {
    DiagSystem::validate(DMatrix::from_column_slice(3, 1, &[1.0, 2.5, -3.5])).unwrap()
}
