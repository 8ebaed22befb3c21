//! Exact arithmetic: scalars over Q and real quadratic fields, dense
//! matrices over them, integer normal forms, lattice intersection and
//! rational reconstruction of floating-point data.

mod intmat;
mod lattice;
mod matrix;
mod normal_form;
mod reconstruct;
mod scalar;

pub use intmat::IntMatrix;
pub use lattice::{lattice_intersect, zrank_intersection, IntLattice, Intersection};
pub use matrix::ExactMatrix;
pub use normal_form::{hnf, integer_kernel, snf};
pub use reconstruct::{
    continued_fraction_convergents, matrix_in_glq, quad_solve_char2, rational_reconstruct,
    DEFAULT_DENOM_BOUND, DEFAULT_RECONSTRUCT_TOL,
};
pub use scalar::{is_squarefree, squarefree_decompose, ExactScalar, Field, QuadraticElem};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("values from Q(sqrt {0}) and Q(sqrt {1}) cannot be mixed")]
    FieldMismatch(u64, u64),
    #[error("radicand {0} is not a squarefree integer >= 2")]
    BadRadicand(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("intersection has rank {achieved}, expected {expected}")]
    RankDeficient { achieved: usize, expected: usize },
    #[error("repeated eigenvalue")]
    RepeatedEigenvalue,
    #[error("eigenvalues are not real")]
    NonRealEigenvalues,
}

impl ExactError {
    /// Stable identifier used in serialized error reports.
    pub fn name(&self) -> &'static str {
        match self {
            ExactError::FieldMismatch(..) => "FieldMismatch",
            ExactError::BadRadicand(_) => "BadRadicand",
            ExactError::DivisionByZero => "DivisionByZero",
            ExactError::Singular => "Singular",
            ExactError::Shape(_) => "Shape",
            ExactError::RankDeficient { .. } => "RankDeficient",
            ExactError::RepeatedEigenvalue => "RepeatedEigenvalue",
            ExactError::NonRealEigenvalues => "NonRealEigenvalues",
        }
    }
}
