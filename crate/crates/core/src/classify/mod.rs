//! Automorphisms of `G`, equivalence of lattices under them, and
//! commensurability.

mod automorphism;
mod commensurability;
mod equivalence;
mod perm;

pub use automorphism::{Automorphism, INTERTWINING_SAMPLES, INTERTWINING_TOL};
pub use commensurability::{
    common_sublattice, commensurable, CommensurabilityRecord, CommonSublattice, Method, Verdict,
};
pub use equivalence::{
    equivalent_by, equivalent_by_exact, equivalent_by_float, search_equivalence, EquivalenceCheck, SearchOptions,
    DEFAULT_EQUIV_TOL, DEFAULT_SEARCH_RADIUS,
};
pub use perm::{
    constraint_residual, delta_of, valid_permutations, valid_permutations_exhaustive, Permutation,
    DEFAULT_PERM_TOL, MAX_PERMUTATION_SIZE,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, ExactMatrix, ExactScalar};
use crate::group::DiagSystem;
use crate::lattice::{Lattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("permutation search over S_{0} is too large")]
    TooLarge(usize),
    #[error("invalid permutation: {0}")]
    InvalidTau(String),
    #[error("scale c_{0} is zero")]
    ZeroScale(usize),
    #[error("row {0} of U is not proportional to the matching row of the system, so beta is not a cocycle")]
    NonCocycle(usize),
    #[error("intertwining check failed with residual {0:e}")]
    IntertwiningFailed(f64),
    #[error("the operation needs exact lattice data")]
    InexactInput,
    #[error("the lattices are defined over different systems")]
    SystemMismatch,
    #[error("the lattices are not known to be commensurable")]
    NotCommensurable,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl ClassifyError {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifyError::TooLarge(_) => "TooLarge",
            ClassifyError::InvalidTau(_) => "InvalidTau",
            ClassifyError::ZeroScale(_) => "ZeroScale",
            ClassifyError::NonCocycle(_) => "NonCocycle",
            ClassifyError::IntertwiningFailed(_) => "IntertwiningFailed",
            ClassifyError::InexactInput => "InexactInput",
            ClassifyError::SystemMismatch => "SystemMismatch",
            ClassifyError::NotCommensurable => "NotCommensurable",
            ClassifyError::Shape(_) => "Shape",
            ClassifyError::Exact(e) => e.name(),
            ClassifyError::Lattice(e) => e.name(),
        }
    }
}

/// How strongly a decision is backed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "level", rename_all = "kebab-case")]
pub enum Certification {
    Exact,
    Tolerance {
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<u64>,
    },
}

/// Exponents beyond this are not attempted when certifying multiplicative
/// relations.
const MAX_CERT_EXPONENT: i64 = 100_000;

pub(crate) fn same_system(a: &DiagSystem, b: &DiagSystem) -> bool {
    a.omega().shape() == b.omega().shape()
        && (a.omega() - b.omega()).amax() <= 1e-9 * a.omega().amax().max(1.0)
}

pub(crate) fn check_systems(l1: &Lattice, l2: &Lattice) -> Result<(), ClassifyError> {
    if same_system(l1.pair().sys(), l2.pair().sys()) {
        Ok(())
    } else {
        Err(ClassifyError::SystemMismatch)
    }
}

/// Exact check of `Π_l (F_l)_{ii}^{X_{lk}} = (E_k)_{π(i)π(i)}` for all `i, k`,
/// i.e. of `ln F · X = P_π ln E` written multiplicatively. Each column of
/// the rational matrix `X` is cleared of denominators first. Returns false
/// when an identity fails or an exponent is too large to attempt.
pub(crate) fn certify_log_relation(
    lhs: &[ExactMatrix],
    x: &ExactMatrix,
    rhs: &[ExactMatrix],
    perm: &Permutation,
) -> Result<bool, ExactError> {
    let m = x.cols();
    let n = perm.len();
    for k in 0..m {
        let mut d = BigInt::one();
        for l in 0..x.rows() {
            d = d.lcm(&x.get(l, k).denominator());
        }
        let Some(d64) = d.to_i64().filter(|v| *v <= MAX_CERT_EXPONENT) else {
            return Ok(false);
        };
        let mut exps = Vec::with_capacity(x.rows());
        for l in 0..x.rows() {
            let q = x.get(l, k).as_rational().ok_or(ExactError::Shape("exponent matrix must be rational".into()))?;
            let e = (q * BigInt::from(d64)).to_integer();
            match e.to_i64().filter(|v| v.abs() <= MAX_CERT_EXPONENT) {
                Some(e) => exps.push(e),
                None => return Ok(false),
            }
        }
        for i in 0..n {
            let mut prod = ExactScalar::one();
            for (l, &e) in exps.iter().enumerate() {
                prod = prod.checked_mul(&lhs[l].get(i, i).pow(e)?)?;
            }
            let target = rhs[k].get(perm.apply(i), perm.apply(i)).pow(d64)?;
            if prod != target {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
