//! Commensurability of `L_(σ,ρ)` and `L_(ν,ϱ)`.
//!
//! The two lattices are commensurable iff `Q = νσ⁻¹ ∈ GL_n(Q)` and
//! `R = ϱ⁻¹ρ ∈ GL_m(Q)`, equivalently iff the factor intersections
//! `σ⁻¹Z^n ∩ ν⁻¹Z^n` and `ρZ^m ∩ ϱZ^m` have full ranks `(n, m)`.
//!
//! With exact data the fiber factor is decided outright. The base matrices
//! `ρ`, `ϱ` are logarithms of the exact multipliers and are only known in
//! floating point, so a rational `R` is reconstructed and then certified by
//! the exact identities `Π_l (F_l)_{ii}^{R_{lk}} = (E_k)_{ii}`; if that fails
//! the base factor stays undecided.

use serde::{Deserialize, Serialize};

use super::{certify_log_relation, check_systems, Certification, ClassifyError, Permutation};
use crate::exact::{lattice_intersect, matrix_in_glq, zrank_intersection, ExactMatrix, IntLattice, Intersection};
use crate::lattice::Lattice;
use num_bigint::BigInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RationalTest,
    RankTest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Commensurable,
    /// Only ever reported with exact certification.
    NotCommensurable,
    /// No rational witness with denominators up to the bound.
    NoWitnessAtBound,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommensurabilityRecord {
    pub verdict: Verdict,
    pub method: Method,
    pub certification: Certification,
    pub bound: u64,
    /// `νσ⁻¹`, when rational.
    pub q: Option<ExactMatrix>,
    /// `ϱ⁻¹ρ`, when rational.
    pub r: Option<ExactMatrix>,
    /// `(rank of the fiber intersection, rank of the base intersection)`,
    /// filled in by the rank test.
    pub ranks: Option<(usize, Option<usize>)>,
    pub note: Option<String>,
}

fn base_witness(l1: &Lattice, l2: &Lattice, bound: u64, tol: f64) -> Result<Option<ExactMatrix>, ClassifyError> {
    let rf = l2.pair().rho_inv() * l1.pair().rho();
    Ok(matrix_in_glq(&rf, bound, tol).unwrap_or(None))
}

/// Decides commensurability. Exact data (both lattices certified exactly)
/// is used when present; otherwise the rational test reconstructs `Q` and
/// `R` from floating point and reports `NoWitnessAtBound` on failure.
pub fn commensurable(l1: &Lattice, l2: &Lattice, method: Method, bound: u64, tol: f64) -> Result<CommensurabilityRecord, ClassifyError> {
    check_systems(l1, l2)?;
    let (n, m) = (l1.n(), l1.m());
    let mut rec = CommensurabilityRecord {
        verdict: Verdict::Undecided,
        method,
        certification: Certification::Tolerance { tol, bound: Some(bound) },
        bound,
        q: None,
        r: None,
        ranks: None,
        note: None,
    };

    let (Some(e1), Some(e2)) = (l1.pair().exact(), l2.pair().exact()) else {
        if method == Method::RankTest {
            rec.note = Some("the rank test needs exact lattice data".into());
            return Ok(rec);
        }
        let qf = l2.pair().sigma() * l1.pair().sigma_inv();
        let q = matrix_in_glq(&qf, bound, tol).unwrap_or(None);
        let r = base_witness(l1, l2, bound, tol)?;
        rec.verdict = if q.is_some() && r.is_some() { Verdict::Commensurable } else { Verdict::NoWitnessAtBound };
        rec.q = q;
        rec.r = r;
        return Ok(rec);
    };

    rec.certification = Certification::Exact;
    let q = e2.sigma.mul(&e1.sigma.inverse()?)?;
    let r = match base_witness(l1, l2, bound, tol)? {
        Some(r) if certify_log_relation(&e2.multipliers, &r, &e1.multipliers, &Permutation::identity(n))? => Some(r),
        _ => None,
    };
    let fiber_full = match method {
        Method::RationalTest => q.is_rational(),
        Method::RankTest => {
            let a = IntLattice::new(e1.sigma.inverse()?)?;
            let b = IntLattice::new(e2.sigma.inverse()?)?;
            let fiber_rank = zrank_intersection(&a, &b)?;
            let base_rank = match &r {
                Some(r) => Some(zrank_intersection(&IntLattice::standard(m), &IntLattice::new(r.inverse()?)?)?),
                None => None,
            };
            rec.ranks = Some((fiber_rank, base_rank));
            fiber_rank == n
        }
    };
    rec.verdict = if !fiber_full {
        Verdict::NotCommensurable
    } else if r.is_some() {
        Verdict::Commensurable
    } else {
        rec.note = Some(format!("no certified rational base witness with denominators up to {bound}"));
        Verdict::Undecided
    };
    if q.is_rational() {
        rec.q = Some(q);
    }
    rec.r = r;
    Ok(rec)
}

/// `L_(σ,ρ) ∩ L_(ν,ϱ)` factor by factor, in the coordinates of the first
/// lattice: `Z^n ∩ Q⁻¹Z^n` on the fiber and `Z^m ∩ R⁻¹Z^m` on the base.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonSublattice {
    pub fiber: Intersection,
    pub base: Intersection,
    /// `[L_(σ,ρ) : L_(σ,ρ) ∩ L_(ν,ϱ)]`
    pub index_left: BigInt,
    /// `[L_(ν,ϱ) : L_(σ,ρ) ∩ L_(ν,ϱ)]`
    pub index_right: BigInt,
}

/// The common sublattice for rational witnesses `Q = νσ⁻¹`, `R = ϱ⁻¹ρ`.
pub fn common_sublattice(q: &ExactMatrix, r: &ExactMatrix) -> Result<CommonSublattice, ClassifyError> {
    if !q.is_rational() || !r.is_rational() {
        return Err(ClassifyError::NotCommensurable);
    }
    let fiber = lattice_intersect(&IntLattice::standard(q.rows()), &IntLattice::new(q.inverse()?)?)?;
    let base = lattice_intersect(&IntLattice::standard(r.rows()), &IntLattice::new(r.inverse()?)?)?;
    Ok(CommonSublattice {
        index_left: &fiber.index_in_first * &base.index_in_first,
        index_right: &fiber.index_in_second * &base.index_in_second,
        fiber,
        base,
    })
}

impl CommensurabilityRecord {
    /// The common sublattice, when the record carries both witnesses.
    pub fn common_sublattice(&self) -> Result<CommonSublattice, ClassifyError> {
        match (&self.verdict, &self.q, &self.r) {
            (Verdict::Commensurable, Some(q), Some(r)) => common_sublattice(q, r),
            _ => Err(ClassifyError::NotCommensurable),
        }
    }
}
