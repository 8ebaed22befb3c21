//! Whether an automorphism carries one lattice onto another:
//! `φ(L_(σ,ρ)) = L_(ν,ϱ)` iff `B = ν α σ⁻¹ ∈ GL_n(Z)` and
//! `C = ϱ⁻¹ δ ρ ∈ GL_m(Z)`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{certify_log_relation, check_systems, valid_permutations, Automorphism, Certification, ClassifyError, Permutation};
use crate::exact::{integer_kernel, ExactMatrix, ExactScalar, IntMatrix};
use crate::lattice::Lattice;

pub const DEFAULT_EQUIV_TOL: f64 = 1e-6;
pub const DEFAULT_SEARCH_RADIUS: i64 = 8;

/// Outcome of testing one automorphism against a pair of lattices.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceCheck {
    pub equivalent: bool,
    /// `ν α σ⁻¹`, when it is an integer matrix.
    pub b: Option<IntMatrix>,
    /// `ϱ⁻¹ δ ρ`, when it is an integer matrix.
    pub c: Option<IntMatrix>,
    /// Signs of `det B` and `det C`; both determinants have absolute value one
    /// when the check succeeds.
    pub det_b_sign: Option<i32>,
    pub det_c_sign: Option<i32>,
    pub residual_b: f64,
    pub residual_c: f64,
    pub certification: Certification,
}

fn sign(v: &BigInt) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Rounds `m`; returns the integer matrix when it lies within `tol`.
fn round_within(m: &DMatrix<f64>, tol: f64) -> (Option<IntMatrix>, f64) {
    match IntMatrix::round_from(m) {
        Some(r) => {
            let res = (m - r.to_f64()).amax();
            if res <= tol {
                (Some(r), res)
            } else {
                (None, res)
            }
        }
        None => (None, f64::INFINITY),
    }
}

fn unimodular_sign(m: &IntMatrix) -> Option<i32> {
    let d = m.det();
    if d.abs().is_one() {
        Some(sign(&d))
    } else {
        None
    }
}

fn c_matrix(phi_delta: &DMatrix<f64>, l1: &Lattice, l2: &Lattice) -> DMatrix<f64> {
    l2.pair().rho_inv() * phi_delta * l1.pair().rho()
}

/// Floating-point check: `B` and `C` must round to integer matrices within
/// `tol` whose determinants are `±1`.
pub fn equivalent_by_float(phi: &Automorphism, l1: &Lattice, l2: &Lattice, tol: f64) -> Result<EquivalenceCheck, ClassifyError> {
    check_systems(l1, l2)?;
    if !super::same_system(phi.sys(), l1.pair().sys()) {
        return Err(ClassifyError::SystemMismatch);
    }
    let bf = l2.pair().sigma() * phi.alpha() * l1.pair().sigma_inv();
    let (b, residual_b) = round_within(&bf, tol);
    let (c, residual_c) = round_within(&c_matrix(phi.delta(), l1, l2), tol);
    let det_b_sign = b.as_ref().and_then(unimodular_sign);
    let det_c_sign = c.as_ref().and_then(unimodular_sign);
    Ok(EquivalenceCheck {
        equivalent: det_b_sign.is_some() && det_c_sign.is_some(),
        b,
        c,
        det_b_sign,
        det_c_sign,
        residual_b,
        residual_c,
        certification: Certification::Tolerance { tol, bound: None },
    })
}

fn exact_alpha(tau: &Permutation, c: &[ExactScalar]) -> Result<ExactMatrix, ClassifyError> {
    let n = tau.len();
    let inv = tau.inverse();
    let mut rows = vec![vec![ExactScalar::zero(); n]; n];
    for i in 0..n {
        rows[inv.apply(i)][i] = c[i].clone();
    }
    Ok(ExactMatrix::from_rows(rows)?)
}

/// Exact check. `B` is computed over the field of the data; `C` is rounded
/// from floating point and then certified through the exact multipliers:
/// `Π_l (F_l)_{ii}^{C_{lk}} = (E_k)_{τ(i)τ(i)}`, with `E`, `F` the
/// multipliers of the two lattices.
pub fn equivalent_by_exact(phi: &Automorphism, l1: &Lattice, l2: &Lattice, tol: f64) -> Result<EquivalenceCheck, ClassifyError> {
    check_systems(l1, l2)?;
    let (Some(c_exact), Some(e1), Some(e2)) = (phi.exact_c(), l1.pair().exact(), l2.pair().exact()) else {
        return Err(ClassifyError::InexactInput);
    };
    let alpha = exact_alpha(phi.tau(), c_exact)?;
    let b_exact = e2.sigma.mul(&alpha)?.mul(&e1.sigma.inverse()?)?;
    let b = b_exact.to_int();
    let (c_round, _) = round_within(&c_matrix(phi.delta(), l1, l2), tol);
    let c = match c_round {
        Some(c) if certify_log_relation(&e2.multipliers, &ExactMatrix::from_int(&c), &e1.multipliers, phi.tau())? => Some(c),
        _ => None,
    };
    let det_b_sign = b.as_ref().and_then(unimodular_sign);
    let det_c_sign = c.as_ref().and_then(unimodular_sign);
    Ok(EquivalenceCheck {
        equivalent: det_b_sign.is_some() && det_c_sign.is_some(),
        residual_b: if b.is_some() { 0.0 } else { f64::INFINITY },
        residual_c: if c.is_some() { 0.0 } else { f64::INFINITY },
        b,
        c,
        det_b_sign,
        det_c_sign,
        certification: Certification::Exact,
    })
}

/// Exact check when `φ` and both lattices carry exact data, floating-point
/// check otherwise.
pub fn equivalent_by(phi: &Automorphism, l1: &Lattice, l2: &Lattice, tol: f64) -> Result<EquivalenceCheck, ClassifyError> {
    if phi.exact_c().is_some() && l1.pair().exact().is_some() && l2.pair().exact().is_some() {
        equivalent_by_exact(phi, l1, l2, tol)
    } else {
        equivalent_by_float(phi, l1, l2, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Largest denominator allowed in the scales `c_i`.
    pub denom_bound: u64,
    /// Largest coefficient (sup-norm) tried in the lattice of admissible `B`.
    pub radius: i64,
    pub tol: f64,
    /// Total number of coefficient vectors examined before giving up.
    pub max_candidates: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            denom_bound: crate::exact::DEFAULT_DENOM_BOUND,
            radius: DEFAULT_SEARCH_RADIUS,
            tol: DEFAULT_EQUIV_TOL,
            max_candidates: 2_000_000,
        }
    }
}

/// Integer matrices `B` with `ν⁻¹ B σ` supported on the pattern of `τ`, as
/// a basis of flattened (row-major) columns.
fn admissible_b(nu_inv: &ExactMatrix, sigma: &ExactMatrix, tau: &Permutation) -> Result<IntMatrix, ClassifyError> {
    let n = tau.len();
    let inv = tau.inverse();
    let mut rows = Vec::new();
    for r in 0..n {
        for i in 0..n {
            if r == inv.apply(i) {
                continue;
            }
            let mut row = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    row.push(nu_inv.get(r, a).checked_mul(sigma.get(b, i))?);
                }
            }
            rows.push(row);
        }
    }
    let system = ExactMatrix::from_rows(rows)?;
    Ok(integer_kernel(&system.rational_constraint_rows()))
}

/// Visits every integer vector of length `dim` with sup-norm exactly `r`.
fn for_each_in_shell(dim: usize, r: i64, mut visit: impl FnMut(&[i64]) -> bool) {
    let side = 2 * r + 1;
    let mut x = vec![-r; dim];
    loop {
        if x.iter().any(|v| v.abs() == r) && !visit(&x) {
            return;
        }
        let mut pos = 0;
        loop {
            if pos == dim {
                return;
            }
            x[pos] += 1;
            if x[pos] - (-r) < side {
                break;
            }
            x[pos] = -r;
            pos += 1;
        }
    }
}

/// Looks for an automorphism with `β = 0` carrying `l1` onto `l2`, over the
/// valid permutations in order. For each `τ` the admissible `B` form a
/// lattice; its points are tried by increasing sup-norm of their
/// coefficients, and within one norm shell by `Σ|B_ij|`, then larger trace,
/// then lexicographically. `None` means no witness within the bounds.
pub fn search_equivalence(l1: &Lattice, l2: &Lattice, opts: SearchOptions) -> Result<Option<(Automorphism, EquivalenceCheck)>, ClassifyError> {
    check_systems(l1, l2)?;
    let (Some(e1), Some(e2)) = (l1.pair().exact(), l2.pair().exact()) else {
        return Err(ClassifyError::InexactInput);
    };
    let sys = l1.pair().sys();
    let n = sys.n();
    let nu_inv = e2.sigma.inverse()?;
    let mut budget = opts.max_candidates;

    for tau in valid_permutations(sys)? {
        let delta = super::delta_of(sys, &tau)?;
        let (c, _) = round_within(&c_matrix(&delta, l1, l2), opts.tol);
        let Some(c) = c else { continue };
        if unimodular_sign(&c).is_none()
            || !certify_log_relation(&e2.multipliers, &ExactMatrix::from_int(&c), &e1.multipliers, &tau)?
        {
            continue;
        }
        let kernel = admissible_b(&nu_inv, &e1.sigma, &tau)?;
        let dim = kernel.cols();
        if dim == 0 {
            continue;
        }
        let inv = tau.inverse();
        for r in 1..=opts.radius {
            let mut found: Vec<((BigInt, BigInt, Vec<BigInt>), Vec<ExactScalar>)> = Vec::new();
            let mut failure = None;
            for_each_in_shell(dim, r, |x| {
                if budget == 0 {
                    return false;
                }
                budget -= 1;
                let flat = kernel.mul_vec(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
                let b = IntMatrix::new(n, n, flat);
                if unimodular_sign(&b).is_none() {
                    return true;
                }
                let alpha = match nu_inv.mul(&ExactMatrix::from_int(&b)).and_then(|m| m.mul(&e1.sigma)) {
                    Ok(a) => a,
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                };
                let scales: Vec<ExactScalar> = (0..n).map(|i| alpha.get(inv.apply(i), i).clone()).collect();
                if scales.iter().any(|s| s.denominator() > BigInt::from(opts.denom_bound)) {
                    return true;
                }
                let l1_norm: BigInt = b.data().iter().map(|v| v.abs()).sum();
                let trace: BigInt = (0..n).map(|i| b[(i, i)].clone()).sum();
                found.push(((l1_norm, -trace, b.data().to_vec()), scales));
                true
            });
            if let Some(e) = failure {
                return Err(e.into());
            }
            found.sort_by(|a, b| a.0.cmp(&b.0));
            for (_, scales) in found {
                let phi = Automorphism::with_exact_scales(sys, tau.clone(), scales)?;
                let check = equivalent_by_exact(&phi, l1, l2, opts.tol)?;
                if check.equivalent {
                    return Ok(Some((phi, check)));
                }
            }
            if budget == 0 {
                return Ok(None);
            }
        }
    }
    Ok(None)
}
