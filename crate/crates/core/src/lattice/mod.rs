//! Splittable lattices `L = σ⁻¹Z^n ⋊ ρZ^m` in `G`.
//!
//! A compatible pair `(σ, ρ)` makes every `A_j = σ exp(ρ^{(j)}·Δ) σ⁻¹` an
//! element of `SL_n(Z)`. Once the pair is verified, all group theory of the
//! lattice runs on the integer matrices `A_j`: an element is stored as
//! integer coordinates `(v, k)` standing for `(σ⁻¹v, ρk)`, and the product is
//! `(v, k)(w, l) = (v + M(k) w, k + l)` with `M(k) = Π A_j^{k_j}`.

mod ops;
mod pair;
mod presentation;

pub use ops::{Lattice, LatticeElement, Reduction, ReduceOptions, DEFAULT_MAX_POWER, DEFAULT_SNAP};
pub use pair::{CompatiblePair, ExactPairData, DEFAULT_PAIR_TOL};
pub use presentation::{Presentation, Relation};

use num_bigint::BigInt;
use thiserror::Error;

use crate::exact::ExactError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("holonomy {j} is {residual:e} away from an integer matrix")]
    NotNearInteger { j: usize, residual: f64 },
    #[error("holonomy {j} has determinant {det}")]
    DetNotOne { j: usize, det: BigInt },
    #[error("holonomy matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("sigma or rho is singular")]
    Singular,
    #[error("exact holonomy {j} has a non-integer entry at {position:?}")]
    NotInteger { j: usize, position: (usize, usize) },
    #[error("exact multiplier {j} is inconsistent: {reason}")]
    BadMultiplier { j: usize, reason: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input has non-finite coordinates")]
    NonFinite,
    #[error("base coordinate {k} exceeds the power budget {bound}")]
    Overflow { k: i64, bound: i64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl LatticeError {
    pub fn name(&self) -> &'static str {
        match self {
            LatticeError::NotNearInteger { .. } => "NotNearInteger",
            LatticeError::DetNotOne { .. } => "DetNotOne",
            LatticeError::NonCommuting(..) => "NonCommuting",
            LatticeError::Singular => "Singular",
            LatticeError::NotInteger { .. } => "NotInteger",
            LatticeError::BadMultiplier { .. } => "BadMultiplier",
            LatticeError::Shape(_) => "Shape",
            LatticeError::NonFinite => "NonFinite",
            LatticeError::Overflow { .. } => "Overflow",
            LatticeError::Exact(e) => e.name(),
        }
    }
}
