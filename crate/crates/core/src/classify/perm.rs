//! Permutations `τ` of the diagonal coordinates compatible with the system,
//! i.e. those with `Ω δ = P_τ Ω` for some `δ`, where row `i` of `P_τ Ω` is
//! row `τ(i)` of `Ω`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::group::DiagSystem;

pub const MAX_PERMUTATION_SIZE: usize = 10;
pub const DEFAULT_PERM_TOL: f64 = 1e-9;

/// A permutation of `{0, .., n-1}` stored as its image list: `self[i] = τ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, ClassifyError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(ClassifyError::InvalidTau(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Rows of `m` rearranged so that row `i` of the result is row `τ(i)`.
    pub fn permute_rows(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(self.0[r], c)])
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", one_based.join(" "))
    }
}

fn scale_of(sys: &DiagSystem) -> f64 {
    sys.omega().amax().max(1.0)
}

/// Largest violation of `Σ_l Ω_{i,l} δ_{l,k} = Ω_{τ(i),k}`.
pub fn constraint_residual(sys: &DiagSystem, tau: &Permutation, delta: &DMatrix<f64>) -> f64 {
    (sys.omega() * delta - tau.permute_rows(sys.omega())).amax()
}

fn least_squares_delta(sys: &DiagSystem, tau: &Permutation) -> DMatrix<f64> {
    if tau.is_identity() {
        return DMatrix::identity(sys.m(), sys.m());
    }
    let omega = sys.omega();
    let gram = (omega.transpose() * omega).try_inverse().expect("validated systems have full column rank");
    gram * omega.transpose() * tau.permute_rows(omega)
}

/// `δ_τ = (ΩᵀΩ)⁻¹ Ωᵀ P_τ Ω`; fails unless the constraint holds to `1e-9`.
pub fn delta_of(sys: &DiagSystem, tau: &Permutation) -> Result<DMatrix<f64>, ClassifyError> {
    if tau.len() != sys.n() {
        return Err(ClassifyError::InvalidTau(format!("{tau} has length {}, expected {}", tau.len(), sys.n())));
    }
    let delta = least_squares_delta(sys, tau);
    let res = constraint_residual(sys, tau, &delta);
    if res > DEFAULT_PERM_TOL * scale_of(sys) {
        return Err(ClassifyError::InvalidTau(format!("{tau} violates the constraint by {res:e}")));
    }
    Ok(delta)
}

/// Next permutation in lexicographic order, in place; false after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every valid `τ` by testing all of `S_n` against the least-squares `δ_τ`.
/// Sorted lexicographically.
pub fn valid_permutations_exhaustive(sys: &DiagSystem) -> Result<Vec<Permutation>, ClassifyError> {
    let n = sys.n();
    if n > MAX_PERMUTATION_SIZE {
        return Err(ClassifyError::TooLarge(n));
    }
    let tol = DEFAULT_PERM_TOL * scale_of(sys);
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let tau = Permutation(p.clone());
        if constraint_residual(sys, &tau, &least_squares_delta(sys, &tau)) <= tol {
            out.push(tau);
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(out)
}

/// Indices of `m` linearly independent rows of `Ω`, chosen greedily.
fn pivot_rows(omega: &DMatrix<f64>) -> Vec<usize> {
    let m = omega.ncols();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for i in 0..omega.nrows() {
        let mut rows = chosen.clone();
        rows.push(i);
        let sub = omega.select_rows(&rows);
        if sub.rank(1e-9 * omega.amax().max(1.0)) == rows.len() {
            chosen.push(i);
            if chosen.len() == m {
                break;
            }
        }
    }
    chosen
}

/// The valid permutations of the system, sorted lexicographically; the same
/// set as [`valid_permutations_exhaustive`].
///
/// `δ` is pinned down by where `τ` sends `m` independent rows of `Ω`, and the
/// rows of `Ω` are pairwise distinct, so each such assignment determines at
/// most one candidate `τ`. Only `n!/(n-m)!` assignments are visited.
pub fn valid_permutations(sys: &DiagSystem) -> Result<Vec<Permutation>, ClassifyError> {
    let (n, m) = (sys.n(), sys.m());
    if n > MAX_PERMUTATION_SIZE {
        return Err(ClassifyError::TooLarge(n));
    }
    let omega = sys.omega();
    let tol = DEFAULT_PERM_TOL * scale_of(sys);
    let pivots = pivot_rows(omega);
    let base_inv = omega
        .select_rows(&pivots)
        .try_inverse()
        .expect("pivot rows are independent");

    let mut out = Vec::new();
    let mut targets = vec![0usize; m];
    let mut used = vec![false; n];
    assign(0, &mut targets, &mut used, &mut |targets: &[usize]| {
        let delta = &base_inv * omega.select_rows(targets);
        let image = omega * &delta;
        let mut tau = Vec::with_capacity(n);
        let mut hit = vec![false; n];
        for i in 0..n {
            let row = image.row(i);
            let j = (0..n).find(|&j| (row - omega.row(j)).amax() <= tol);
            match j {
                Some(j) if !hit[j] => {
                    hit[j] = true;
                    tau.push(j);
                }
                _ => return,
            }
        }
        let tau = Permutation(tau);
        if constraint_residual(sys, &tau, &least_squares_delta(sys, &tau)) <= tol {
            out.push(tau);
        }
    });
    out.sort();
    out.dedup();
    Ok(out)
}

fn assign(depth: usize, targets: &mut Vec<usize>, used: &mut Vec<bool>, visit: &mut impl FnMut(&[usize])) {
    if depth == targets.len() {
        visit(targets);
        return;
    }
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            targets[depth] = j;
            assign(depth + 1, targets, used, visit);
            used[j] = false;
        }
    }
}
