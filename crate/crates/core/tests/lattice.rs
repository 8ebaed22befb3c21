mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use proptest::prelude::*;
use solvlat::exact::{ExactMatrix, ExactScalar, IntMatrix};
use solvlat::group::{DiagSystem, GroupElement};
use solvlat::lattice::{CompatiblePair, Lattice, LatticeElement, LatticeError, ReduceOptions, Relation};

fn el(v: &[i64], k: &[i64]) -> LatticeElement {
    LatticeElement::from_i64(v, k)
}

#[test]
fn golden_pair_holonomy() {
    let pair = golden_pair();
    assert_eq!(pair.holonomy()[0], IntMatrix::from_rows_i64(&[[2, 1], [1, 1]]));
    assert!(pair.residual() < 1e-9);
}

#[test]
fn diag_two_half_is_not_near_integer() {
    let l = 2f64.ln();
    let sys = DiagSystem::validate(DMatrix::from_column_slice(2, 1, &[l, -l])).unwrap();
    let err = CompatiblePair::verify(&sys, &DMatrix::identity(2, 2), &DMatrix::identity(1, 1), 1e-6).unwrap_err();
    assert!(matches!(err, LatticeError::NotNearInteger { j: 0, residual } if (residual - 0.5).abs() < 1e-12));
}

#[test]
fn singular_sigma_is_rejected() {
    let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    let err = CompatiblePair::verify(&golden_system(), &s, &DMatrix::identity(1, 1), 1e-6).unwrap_err();
    assert_eq!(err, LatticeError::Singular);
}

#[test]
fn scaling_preserves_compatibility() {
    let pair = golden_pair();
    for q in 1..=4 {
        let scaled = pair.scaled(1.7, q, 1e-6).unwrap();
        assert_eq!(scaled.holonomy()[0], pair.holonomy()[0].pow(q as u64));
    }
    let neg = pair.scaled(-0.3, -2, 1e-6).unwrap();
    let inv = pair.holonomy()[0].inverse_unimodular().unwrap();
    assert_eq!(neg.holonomy()[0], inv.pow(2));
}

#[test]
fn exact_pair_golden() {
    let sys = golden_system();
    let pair = CompatiblePair::verify_exact(&sys, &golden_sigma_exact(), &[golden_multiplier(1)]).unwrap();
    assert_eq!(pair.holonomy()[0], IntMatrix::from_rows_i64(&[[2, 1], [1, 1]]));
    assert_eq!(pair.residual(), 0.0);
    assert!((pair.rho()[(0, 0)] - 1.0).abs() < 1e-12);

    let sq = CompatiblePair::verify_exact(&sys, &golden_sigma_exact(), &[golden_multiplier(2)]).unwrap();
    assert_eq!(sq.holonomy()[0], IntMatrix::from_rows_i64(&[[5, 3], [3, 2]]));
    let oracle = mul2([[2, 1], [1, 1]], [[2, 1], [1, 1]]);
    assert_eq!(sq.holonomy()[0], IntMatrix::from_rows_i64(&oracle));
    assert!((sq.rho()[(0, 0)] - 2.0).abs() < 1e-12);
}

#[test]
fn exact_pair_non_integer() {
    let l = 2f64.ln();
    let sys = DiagSystem::validate(DMatrix::from_column_slice(2, 1, &[l, -l])).unwrap();
    let e = ExactMatrix::diagonal(vec![ExactScalar::from_i64(2), ExactScalar::ratio(1, 2)]).unwrap();
    let err = CompatiblePair::verify_exact(&sys, &ExactMatrix::identity(2), &[e]).unwrap_err();
    assert_eq!(err, LatticeError::NotInteger { j: 0, position: (1, 1) });
}

#[test]
fn exact_pair_rejects_bad_multipliers() {
    let sys = golden_system();
    let e = ExactMatrix::diagonal(vec![ExactScalar::from_i64(2), ExactScalar::from_i64(3)]).unwrap();
    let err = CompatiblePair::verify_exact(&sys, &golden_sigma_exact(), &[e]).unwrap_err();
    assert_eq!(err.name(), "BadMultiplier");
}

#[test]
fn holonomy_examples() {
    let lat = golden_lattice();
    assert!(lat.holonomy(&[0]).is_identity());
    assert_eq!(lat.holonomy(&[2]), IntMatrix::from_rows_i64(&[[5, 3], [3, 2]]));
    assert_eq!(lat.holonomy(&[-1]), IntMatrix::from_rows_i64(&[[1, -1], [-1, 2]]));
}

#[test]
fn lattice_products() {
    let lat = golden_lattice();
    let a = el(&[1, 0], &[1]);
    assert_eq!(lat.mul(&a, &lat.identity()), a);
    assert_eq!(lat.mul(&a, &el(&[0, 1], &[0])), el(&[2, 1], &[1]));
    assert_eq!(lat.inv(&lat.identity()), lat.identity());
    assert_eq!(lat.inv(&el(&[1, 0], &[0])), el(&[-1, 0], &[0]));
    assert_eq!(lat.inv(&a), el(&[-1, 1], &[-1]));
    assert!(lat.mul(&a, &lat.inv(&a)).is_identity());
}

#[test]
fn to_group_examples() {
    let lat = golden_lattice();
    let id = lat.to_group(&lat.identity());
    assert!(id.distance(&lat.pair().sys().identity()) == 0.0);
    let g = lat.to_group(&el(&[1, 0], &[0]));
    let col = lat.pair().sigma_inv().column(0).into_owned();
    assert!((g.x - col).amax() < 1e-15);
    assert_eq!(g.t[0], 0.0);
}

#[test]
fn membership_examples() {
    let lat = golden_lattice();
    let a = el(&[3, -2], &[2]);
    assert_eq!(lat.membership(&lat.to_group(&a), 1e-6), Some(a));
    let x = lat.pair().sigma_inv() * DVector::from_vec(vec![0.5, 0.0]);
    assert_eq!(lat.membership(&GroupElement::new(x, DVector::zeros(1)), 1e-6), None);
}

#[test]
fn reduction_examples() {
    let lat = golden_lattice();
    let sys = lat.pair().sys().clone();
    let red = lat.reduce(&sys.identity()).unwrap();
    assert!(red.gamma.is_identity());
    assert_eq!(red.r.distance(&sys.identity()), 0.0);

    let inside = GroupElement::new(
        lat.pair().sigma_inv() * DVector::from_vec(vec![0.25, 0.5]),
        DVector::from_vec(vec![0.75]),
    );
    let red = lat.reduce(&inside).unwrap();
    assert!(red.gamma.is_identity());
    assert!(red.r.distance(&inside) < 1e-12);

    let a = el(&[4, -7], &[-3]);
    let red = lat.reduce(&lat.to_group(&a)).unwrap();
    assert_eq!(red.gamma, a);
    assert!(red.r.distance(&sys.identity()) < 1e-9);
}

#[test]
fn reduction_overflow() {
    let lat = golden_lattice();
    let g = GroupElement::from_slices(&[0.0, 0.0], &[50.0]);
    let err = lat.reduce_with(&g, ReduceOptions { max_power: 10, ..Default::default() }).unwrap_err();
    assert_eq!(err, LatticeError::Overflow { k: 50, bound: 10 });
}

#[test]
fn presentation_of_golden_lattice() {
    let p = golden_lattice().presentation();
    assert_eq!(p.relations.len(), 1 + 0 + 2);
    assert_eq!(p.relations[0], Relation::FiberCommute { i: 0, j: 1 });
    // columns of A = [[2,1],[1,1]]
    assert_eq!(p.relations[1], Relation::Conjugation { j: 0, i: 0, exponents: vec![BigInt::from(2), BigInt::from(1)] });
    assert_eq!(p.relations[2], Relation::Conjugation { j: 0, i: 1, exponents: vec![BigInt::from(1), BigInt::from(1)] });
    assert!(p.to_string().contains("t1 x1 t1^-1 = x1^2 x2^1"));
}

#[test]
fn discreteness_witness_is_positive() {
    let d = golden_lattice().discreteness_witness(3);
    assert!(d > 0.1, "witness {d}");
}

fn element() -> impl Strategy<Value = LatticeElement> {
    (prop::collection::vec(-20i64..=20, 2), -5i64..=5).prop_map(|(v, k)| el(&v, &[k]))
}

proptest! {
    #[test]
    fn embedding_is_a_homomorphism(a in element(), b in element()) {
        let lat = golden_lattice();
        let sys = lat.pair().sys();
        let lhs = lat.to_group(&lat.mul(&a, &b));
        let rhs = sys.mul(&lat.to_group(&a), &lat.to_group(&b));
        let scale = 1.0 + lhs.x.amax();
        prop_assert!(lhs.distance(&rhs) < 1e-8 * scale);
    }

    #[test]
    fn multiplication_is_associative(a in element(), b in element(), c in element()) {
        let lat = golden_lattice();
        prop_assert_eq!(lat.mul(&lat.mul(&a, &b), &c), lat.mul(&a, &lat.mul(&b, &c)));
    }

    #[test]
    fn inverse_is_involutive(a in element()) {
        let lat = golden_lattice();
        prop_assert_eq!(lat.inv(&lat.inv(&a)), a.clone());
        prop_assert!(lat.mul(&lat.inv(&a), &a).is_identity());
    }

    #[test]
    fn holonomy_is_a_homomorphism(k in -8i64..=8, l in -8i64..=8) {
        let lat = golden_lattice();
        prop_assert_eq!(lat.holonomy(&[k + l]), lat.holonomy(&[k]).mul(&lat.holonomy(&[l])));
    }

    #[test]
    fn membership_roundtrip(a in element()) {
        let lat = golden_lattice();
        prop_assert_eq!(lat.membership(&lat.to_group(&a), 1e-6), Some(a));
    }

    #[test]
    fn reduction_contract(x in prop::collection::vec(-30.0f64..30.0, 2), t in -5.0f64..5.0) {
        let lat = golden_lattice();
        let sys = lat.pair().sys();
        let g = GroupElement::from_slices(&x, &[t]);
        let red = lat.reduce(&g).unwrap();
        prop_assert!(red.z.iter().chain(red.y.iter()).all(|&c| (0.0..1.0).contains(&c)));
        let back = sys.mul(&lat.to_group(&red.gamma), &red.r);
        prop_assert!(back.distance(&g) < 1e-8 * (1.0 + g.x.amax()));
        let again = lat.reduce(&red.r).unwrap();
        prop_assert!(again.gamma.is_identity());
        prop_assert!(again.r.distance(&red.r) < 1e-12);
    }

    #[test]
    fn reduction_recovers_lattice_points(a in element()) {
        let lat = golden_lattice();
        let red = lat.reduce(&lat.to_group(&a)).unwrap();
        prop_assert_eq!(red.gamma, a);
    }
}

#[test]
fn three_dimensional_pair() {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0]);
    let eig = a.clone().symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let sigma = DMatrix::from_fn(3, 3, |r, c| eig.eigenvectors[(r, idx[c])]);
    let logs: Vec<f64> = idx.iter().map(|&i| vals[i].ln()).collect();
    let sys = DiagSystem::validate(DMatrix::from_column_slice(3, 1, &logs)).unwrap();
    let lat = Lattice::new(CompatiblePair::verify(&sys, &sigma, &DMatrix::identity(1, 1), 1e-9).unwrap());
    assert_eq!(lat.pair().holonomy()[0], IntMatrix::from_rows_i64(&[[2, 1, 0], [1, 2, 1], [0, 1, 1]]));
    assert_eq!(lat.presentation().relations.len(), 3 + 0 + 3);
    let a = el(&[1, -2, 3], &[2]);
    let red = lat.reduce(&lat.to_group(&a)).unwrap();
    assert_eq!(red.gamma, a);
}
