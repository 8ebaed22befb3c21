//! Intersections of lattices given by exact bases.
//!
//! A basis `B` (columns) spans `B Z^r`. Two lattices `B1 Z^n`, `B2 Z^n`
//! meet in `{B1 u : B1 u = B2 w, u, w integral}`; the pairs `(u, w)` form the
//! integer kernel of `[B1 | -B2]` once the system is written over Q (splitting
//! off the `sqrt d` parts over a quadratic field).

use num_bigint::BigInt;
use num_traits::Signed;

use super::normal_form::column_hnf;
use super::{integer_kernel, ExactError, ExactMatrix, IntMatrix};

/// A lattice `basis * Z^r` in an `n`-dimensional space; the columns of
/// `basis` are linearly independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    basis: ExactMatrix,
}

impl IntLattice {
    pub fn new(basis: ExactMatrix) -> Result<Self, ExactError> {
        if basis.rank() != basis.cols() {
            return Err(ExactError::RankDeficient { achieved: basis.rank(), expected: basis.cols() });
        }
        Ok(IntLattice { basis })
    }

    /// The standard lattice `Z^n`.
    pub fn standard(n: usize) -> Self {
        IntLattice { basis: ExactMatrix::identity(n) }
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Whether `v` lies in the lattice: `basis * c = v` has an integral
    /// solution `c`.
    pub fn contains(&self, v: &ExactMatrix) -> Result<bool, ExactError> {
        // solve via the square subsystem picked by pivot rows of the basis
        let (b, n, r) = (&self.basis, self.dim(), self.rank());
        if r == n {
            let c = b.inverse()?.mul(v)?;
            return Ok(c.is_integral());
        }
        let bt = b.transpose();
        let gram = bt.mul(b)?;
        let c = gram.inverse()?.mul(&bt.mul(v)?)?;
        Ok(c.is_integral() && b.mul(&c)? == *v)
    }
}

/// Result of intersecting two full-rank lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub lattice: IntLattice,
    /// `[B1 Z^n : C Z^n]`
    pub index_in_first: BigInt,
    /// `[B2 Z^n : C Z^n]`
    pub index_in_second: BigInt,
    /// Coordinates of the intersection basis with respect to `B1` and `B2`.
    pub coords_first: IntMatrix,
    pub coords_second: IntMatrix,
}

fn stacked_kernel(b1: &ExactMatrix, b2: &ExactMatrix) -> Result<IntMatrix, ExactError> {
    if b1.rows() != b2.rows() {
        return Err(ExactError::Shape(format!(
            "lattices in dimensions {} and {}",
            b1.rows(),
            b2.rows()
        )));
    }
    let system = b1.hstack(&b2.scale(&-super::ExactScalar::one())?)?;
    Ok(integer_kernel(&system.rational_constraint_rows()))
}

/// Intersection of two full-rank lattices of the same dimension, with both
/// indices. Fails with `RankDeficient` when the intersection has smaller
/// rank (the lattices are not commensurable).
pub fn lattice_intersect(b1: &IntLattice, b2: &IntLattice) -> Result<Intersection, ExactError> {
    let n = b1.dim();
    if b1.rank() != n || b2.rank() != b2.dim() {
        return Err(ExactError::Shape("lattice_intersect needs full-rank bases".into()));
    }
    let kernel = stacked_kernel(&b1.basis, &b2.basis)?;
    if kernel.cols() < n {
        return Err(ExactError::RankDeficient { achieved: kernel.cols(), expected: n });
    }
    // canonical basis of the kernel lattice, then split into (u, w) blocks
    let kernel = column_hnf(&kernel);
    let u = IntMatrix::from_fn(n, n, |r, c| kernel[(r, c)].clone());
    let w = IntMatrix::from_fn(n, n, |r, c| kernel[(n + r, c)].clone());
    let c = b1.basis.mul(&ExactMatrix::from_int(&u))?;
    let index_in_first = u.det().abs();
    let index_in_second = w.det().abs();
    Ok(Intersection {
        lattice: IntLattice { basis: c },
        index_in_first,
        index_in_second,
        coords_first: u,
        coords_second: w,
    })
}

/// `rank_Z(B1 Z^r1 ∩ B2 Z^r2)`: the dimension of the rational solution
/// space of `B1 u = B2 w`, whose integer points form a lattice of full rank
/// in it. Over Q this is always the full rank; over `Q(sqrt d)` the
/// irrational parts cut it down.
pub fn zrank_intersection(b1: &IntLattice, b2: &IntLattice) -> Result<usize, ExactError> {
    Ok(stacked_kernel(&b1.basis, &b2.basis)?.cols())
}
