mod common;

use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use solvlat::exact::{ExactMatrix, ExactScalar, IntMatrix};
use solvlat::factory::*;

fn input(rows: &[[i64; 2]]) -> Result<HyperbolicInput, FactoryError> {
    HyperbolicInput::new(vec![IntMatrix::from_rows_i64(rows)])
}

/// Independent 3x3 determinant by cofactor expansion.
fn det3(a: [[i64; 3]; 3]) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

#[test]
fn golden_from_hyperbolic() {
    let out = from_hyperbolic(&input(&[[2, 1], [1, 1]]).unwrap()).unwrap();
    let l1 = golden();
    assert!((out.eigenvalues[(0, 0)] - l1).abs() < 1e-12);
    assert!((out.eigenvalues[(1, 0)] - 1.0 / l1).abs() < 1e-12);
    assert_eq!(out.pair.holonomy()[0], IntMatrix::from_rows_i64(&[[2, 1], [1, 1]]));
    assert!(out.pair.residual() < 1e-9);
    assert!((out.sys.omega()[(0, 0)] - l1.ln()).abs() < 1e-12);
}

#[test]
fn rejected_inputs() {
    assert_eq!(input(&[[1, 0], [0, 1]]).unwrap_err(), FactoryError::RepeatedEigenvalue(0));
    assert_eq!(input(&[[0, -1], [1, 0]]).unwrap_err(), FactoryError::NonPositiveSpectrum(0));
    assert_eq!(input(&[[-2, 1], [-1, 0]]).unwrap_err(), FactoryError::NonPositiveSpectrum(0));
    assert_eq!(input(&[[-3, 1], [-1, 0]]).unwrap_err(), FactoryError::NonPositiveSpectrum(0));
    assert_eq!(input(&[[1, 1], [1, 1]]).unwrap_err(), FactoryError::DetNotOne { j: 0, det: BigInt::from(0) });
    let a = IntMatrix::from_rows_i64(&[[2, 1], [1, 1]]);
    let b = IntMatrix::from_rows_i64(&[[1, 1], [0, 1]]);
    assert_eq!(HyperbolicInput::new(vec![a, b]).unwrap_err(), FactoryError::NotCommuting(0, 1));
    let checks = HyperbolicInput::inspect(&[IntMatrix::from_rows_i64(&[[0, -1], [1, 0]])]);
    assert!(checks.det_one && checks.commuting && !checks.positive_spectrum);
}

#[test]
fn eigenvalue_one_in_three_dimensions() {
    // block diag(1, [[2,1],[1,1]]) has eigenvalue exactly 1
    let a = IntMatrix::from_rows_i64(&[[1, 0, 0], [0, 2, 1], [0, 1, 1]]);
    assert_eq!(HyperbolicInput::new(vec![a]).unwrap_err(), FactoryError::EigenvalueOne(0));
}

#[test]
fn exact_golden() {
    let out = from_hyperbolic_exact_2d([[2, 1], [1, 1]]).unwrap();
    assert_eq!(out.sigma, golden_sigma_exact());
    assert_eq!(out.multiplier, golden_multiplier(1));
    let recovered = out.sigma.mul(&out.multiplier).unwrap().mul(&out.sigma.inverse().unwrap()).unwrap();
    assert_eq!(recovered, ExactMatrix::from_i64_rows(&[[2, 1], [1, 1]]));
    assert_eq!(out.pair.residual(), 0.0);
    assert!(out.multiplier.det().unwrap().is_one());
}

#[test]
fn exact_sqrt3() {
    let out = from_hyperbolic_exact_2d([[3, 1], [2, 1]]).unwrap();
    let s3 = ExactScalar::sqrt_of(3).unwrap();
    assert_eq!(out.multiplier.get(0, 0), &(&ExactScalar::from_i64(2) + &s3));
    let recovered = out.sigma.mul(&out.multiplier).unwrap().mul(&out.sigma.inverse().unwrap()).unwrap();
    assert_eq!(recovered, ExactMatrix::from_i64_rows(&[[3, 1], [2, 1]]));
    assert_eq!(out.pair.holonomy()[0], IntMatrix::from_rows_i64(&[[3, 1], [2, 1]]));
}

#[test]
fn exact_rejections() {
    assert!(matches!(from_hyperbolic_exact_2d([[1, 1], [1, 1]]), Err(FactoryError::DetNotOne { .. })));
    assert_eq!(from_hyperbolic_exact_2d([[1, 1], [0, 1]]).unwrap_err(), FactoryError::NotHyperbolic { trace: 2 });
    assert_eq!(from_hyperbolic_exact_2d([[-2, 1], [-3, 1]]).unwrap_err(), FactoryError::NotHyperbolic { trace: -1 });
}

#[test]
fn family_examples() {
    assert_eq!(family_3d(1, 1).unwrap(), IntMatrix::from_rows_i64(&[[2, 0, 1], [0, 1, 1], [1, 1, 2]]));
    assert_eq!(family_3d(0, 1).unwrap_err(), FactoryError::Degenerate { k: 0, l: 1 });
    assert_eq!(family_3d(3, 0).unwrap_err(), FactoryError::Degenerate { k: 3, l: 0 });
    for k in -50..=50i64 {
        for l in -50..=50i64 {
            if k * l == 0 {
                continue;
            }
            let a = family_3d(k, l).unwrap();
            assert_eq!(a.det(), BigInt::from(1));
            let rows = [[k * k + 1, 0, k], [0, 1, l], [k, l, l * l + 1]];
            assert_eq!(det3(rows), 1);
        }
    }
}

#[test]
fn family_pairs_reanchor() {
    for (k, l) in [(1, 1), (2, 3), (1, -2), (3, 3)] {
        let a = family_3d(k, l).unwrap();
        let out = from_hyperbolic(&HyperbolicInput::new(vec![a.clone()]).unwrap()).unwrap();
        assert_eq!(out.pair.holonomy()[0], a);
        assert!(out.pair.residual() < 1e-6);
        let prod: f64 = out.eigenvalues.column(0).iter().product();
        assert!((prod - 1.0).abs() < 1e-10);
    }
}

#[test]
fn commuting_family_with_two_generators() {
    // block-diagonal generators with independent logarithms
    let a = [[2i64, 1], [1, 1]];
    let b = [[5i64, 2], [2, 1]];
    let block = |x: [[i64; 2]; 2], y: [[i64; 2]; 2]| {
        IntMatrix::from_rows_i64(&[
            [x[0][0], x[0][1], 0, 0],
            [x[1][0], x[1][1], 0, 0],
            [0, 0, y[0][0], y[0][1]],
            [0, 0, y[1][0], y[1][1]],
        ])
    };
    let id = [[1i64, 0], [0, 1]];
    let a1 = block(a, b);
    let a2 = block(a, id);
    let a2 = a2.mul(&block(id, b).pow(2));
    let input = HyperbolicInput::new(vec![a1.clone(), a2.clone()]).unwrap();
    let out = from_hyperbolic(&input).unwrap();
    assert_eq!(out.pair.holonomy(), &[a1, a2]);
    assert_eq!(out.sys.m(), 2);
}

#[test]
fn column_pairing() {
    let out = from_hyperbolic(&HyperbolicInput::new(vec![family_3d(2, 3).unwrap()]).unwrap()).unwrap();
    let a = family_3d(2, 3).unwrap().to_f64();
    let p = out.pair.sigma();
    for i in 0..3 {
        let col = p.column(i);
        let r = (&a * col - col * out.eigenvalues[(i, 0)]).amax();
        assert!(r < 1e-7);
        assert!((col.amax() - 1.0).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn random_sl2_hyperbolic(a in 1i64..8, b in 1i64..8, c in 1i64..8) {
        // [[a, b], [c, d]] with ad - bc = 1 when (1 + bc) is divisible by a
        prop_assume!((1 + b * c) % a == 0);
        let d = (1 + b * c) / a;
        prop_assume!(a + d > 2);
        let m = [[a, b], [c, d]];
        let out = from_hyperbolic(&input(&m).unwrap()).unwrap();
        prop_assert_eq!(&out.pair.holonomy()[0], &IntMatrix::from_rows_i64(&m));
        let exact = from_hyperbolic_exact_2d(m).unwrap();
        prop_assert_eq!(&exact.pair.holonomy()[0], &IntMatrix::from_rows_i64(&m));
        prop_assert!(exact.multiplier.det().unwrap().is_one());
    }
}

#[test]
fn swapped_eigenvector_columns_give_inverse() {
    // with the columns of σ in the opposite order, σ diag(λ1, λ2) σ⁻¹ is A⁻¹
    let s = golden_sigma_exact();
    let swapped = ExactMatrix::from_rows(vec![
        vec![s.get(0, 1).clone(), s.get(0, 0).clone()],
        vec![s.get(1, 1).clone(), s.get(1, 0).clone()],
    ])
    .unwrap();
    let a = swapped.mul(&golden_multiplier(1)).unwrap().mul(&swapped.inverse().unwrap()).unwrap();
    assert_eq!(a, ExactMatrix::from_i64_rows(&[[1, -1], [-1, 2]]));
}
