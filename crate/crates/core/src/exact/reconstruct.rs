//! Recovering exact values from floating-point data, and exact eigenvalues
//! of 2x2 integer matrices.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{squarefree_decompose, ExactError, ExactMatrix, ExactScalar};

pub const DEFAULT_DENOM_BOUND: u64 = 1_000_000;
pub const DEFAULT_RECONSTRUCT_TOL: f64 = 1e-9;

/// Convergents `p/q` of the continued fraction of `x`, stopping once the
/// denominator exceeds `max_denom` or the expansion terminates.
pub fn continued_fraction_convergents(x: f64, max_denom: u64) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut p_prev, mut p) = (1i128, x.floor() as i128);
    let (mut q_prev, mut q) = (0i128, 1i128);
    out.push((p, q));
    let mut frac = x - x.floor();
    while frac > 0.0 {
        let inv = 1.0 / frac;
        if !inv.is_finite() || inv > 1e18 {
            break;
        }
        let a = inv.floor() as i128;
        frac = inv - inv.floor();
        let p_next = a * p + p_prev;
        let q_next = a * q + q_prev;
        if q_next > max_denom as i128 {
            break;
        }
        (p_prev, p) = (p, p_next);
        (q_prev, q) = (q, q_next);
        out.push((p, q));
    }
    out
}

/// The first continued-fraction convergent `p/q` of `x` with `q <= max_denom`
/// and `|x - p/q| <= tol`.
///
/// The tolerance is capped at `1 / (2 max_denom^2)`: two distinct fractions
/// with denominators at most `max_denom` are at least `1 / max_denom^2` apart,
/// so below the cap the answer is unique.
pub fn rational_reconstruct(x: f64, max_denom: u64, tol: f64) -> Option<BigRational> {
    let max_denom = max_denom.max(1);
    let cap = 0.5 / (max_denom as f64 * max_denom as f64);
    let tol = tol.min(cap);
    continued_fraction_convergents(x, max_denom)
        .into_iter()
        .find(|&(p, q)| (x - p as f64 / q as f64).abs() <= tol)
        .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

/// Rational reconstruction of a square floating matrix. `Ok(None)` when some
/// entry has no rational within `tol` with denominator at most `max_denom`;
/// a returned matrix is certified only to that tolerance.
pub fn matrix_in_glq(m: &DMatrix<f64>, max_denom: u64, tol: f64) -> Result<Option<ExactMatrix>, ExactError> {
    if m.nrows() != m.ncols() {
        return Err(ExactError::Shape(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let mut data = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            match rational_reconstruct(m[(r, c)], max_denom, tol) {
                Some(q) => data.push(ExactScalar::from_rational(q)),
                None => return Ok(None),
            }
        }
    }
    let out = ExactMatrix::new(m.nrows(), m.ncols(), data)?;
    if out.det()?.is_zero() {
        return Err(ExactError::Singular);
    }
    Ok(Some(out))
}

/// Exact eigenvalues `(larger, smaller)` of a 2x2 integer matrix, in
/// `Q(sqrt d)` where `d` is the squarefree part of the discriminant, or in Q
/// when the discriminant is a perfect square.
pub fn quad_solve_char2(a: [[i64; 2]; 2]) -> Result<(ExactScalar, ExactScalar), ExactError> {
    let tr = BigInt::from(a[0][0]) + BigInt::from(a[1][1]);
    let det = BigInt::from(a[0][0]) * BigInt::from(a[1][1]) - BigInt::from(a[0][1]) * BigInt::from(a[1][0]);
    let disc = &tr * &tr - BigInt::from(4) * det;
    if disc.is_zero() {
        return Err(ExactError::RepeatedEigenvalue);
    }
    if disc.is_negative() {
        return Err(ExactError::NonRealEigenvalues);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let center = BigRational::from_integer(tr) * &half;
    let (f, core) = squarefree_decompose(&disc);
    let offset = BigRational::from_integer(f) * &half;
    if core.is_one() {
        let hi = ExactScalar::from_rational(&center + &offset);
        let lo = ExactScalar::from_rational(center - offset);
        return Ok((hi, lo));
    }
    let d: u64 = core.try_into().map_err(|_| ExactError::Shape("discriminant too large".into()))?;
    let hi = ExactScalar::quadratic(center.clone(), offset.clone(), d)?;
    let lo = ExactScalar::quadratic(center, -offset, d)?;
    Ok((hi, lo))
}
